#include "thermadet/tiff.hpp"

#include <cstring>
#include <fstream>
#include <vector>

namespace thermadet::io {

namespace {

void put16(std::vector<uint8_t>& b, uint16_t v) {
    b.push_back(static_cast<uint8_t>(v & 0xff));
    b.push_back(static_cast<uint8_t>(v >> 8));
}

void put32(std::vector<uint8_t>& b, uint32_t v) {
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<uint8_t>((v >> (8 * i)) & 0xff));
}

void put_entry(std::vector<uint8_t>& b, uint16_t tag, uint16_t type, uint32_t count, uint32_t value) {
    put16(b, tag);
    put16(b, type);
    put32(b, count);
    put32(b, value);
}

struct Reader {
    std::vector<uint8_t> bytes;
    size_t pos = 0;

    uint16_t u16(size_t at) const {
        if (at + 2 > bytes.size()) throw std::runtime_error("tiff: truncated file");
        return static_cast<uint16_t>(bytes[at] | (bytes[at + 1] << 8));
    }
    uint32_t u32(size_t at) const {
        if (at + 4 > bytes.size()) throw std::runtime_error("tiff: truncated file");
        uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | bytes[at + i];
        return v;
    }
};

constexpr uint16_t kTypeShort = 3;
constexpr uint16_t kTypeLong = 4;

}  // namespace

void write_tiff16(const std::filesystem::path& path, const Image16& img) {
    const auto h = static_cast<uint32_t>(img.rows());
    const auto w = static_cast<uint32_t>(img.cols());
    const uint32_t data_bytes = h * w * 2;

    std::vector<uint8_t> out;
    out.reserve(8 + 2 + 9 * 12 + 4 + data_bytes);

    // Header: little-endian magic, IFD directly after the 8-byte header.
    out.push_back('I');
    out.push_back('I');
    put16(out, 42);
    put32(out, 8);

    const uint16_t n_entries = 9;
    const uint32_t ifd_size = 2 + n_entries * 12 + 4;
    const uint32_t strip_offset = 8 + ifd_size;

    put16(out, n_entries);
    put_entry(out, 256, kTypeLong, 1, w);             // ImageWidth
    put_entry(out, 257, kTypeLong, 1, h);             // ImageLength
    put_entry(out, 258, kTypeShort, 1, 16);           // BitsPerSample
    put_entry(out, 259, kTypeShort, 1, 1);            // Compression: none
    put_entry(out, 262, kTypeShort, 1, 1);            // Photometric: BlackIsZero
    put_entry(out, 273, kTypeLong, 1, strip_offset);  // StripOffsets
    put_entry(out, 278, kTypeLong, 1, h);             // RowsPerStrip
    put_entry(out, 279, kTypeLong, 1, data_bytes);    // StripByteCounts
    put_entry(out, 339, kTypeShort, 1, 1);            // SampleFormat: unsigned
    put32(out, 0);                                    // next IFD

    for (uint32_t r = 0; r < h; ++r)
        for (uint32_t c = 0; c < w; ++c) put16(out, img(r, c));

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("tiff: cannot open for writing: " + path.string());
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!f) throw std::runtime_error("tiff: write failed: " + path.string());
}

Image16 read_tiff16(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("tiff: cannot open: " + path.string());
    Reader r;
    r.bytes.assign(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());

    if (r.bytes.size() < 8 || r.bytes[0] != 'I' || r.bytes[1] != 'I' || r.u16(2) != 42)
        throw std::runtime_error("tiff: not a little-endian TIFF: " + path.string());

    const uint32_t ifd = r.u32(4);
    const uint16_t n = r.u16(ifd);

    uint32_t width = 0, height = 0, bits = 0, compression = 1, strip_offset = 0, strip_bytes = 0;
    for (uint16_t i = 0; i < n; ++i) {
        const size_t e = ifd + 2 + i * 12u;
        const uint16_t tag = r.u16(e);
        const uint16_t type = r.u16(e + 2);
        const uint32_t value = (type == kTypeShort) ? r.u16(e + 8) : r.u32(e + 8);
        switch (tag) {
            case 256: width = value; break;
            case 257: height = value; break;
            case 258: bits = value; break;
            case 259: compression = value; break;
            case 273: strip_offset = value; break;
            case 279: strip_bytes = value; break;
            default: break;
        }
    }

    if (bits != 16) throw std::runtime_error("tiff: expected 16 bits per sample");
    if (compression != 1) throw std::runtime_error("tiff: expected uncompressed data");
    if (width == 0 || height == 0) throw std::runtime_error("tiff: missing dimensions");
    if (strip_bytes < width * height * 2) throw std::runtime_error("tiff: strip too small");
    if (strip_offset + width * height * 2 > r.bytes.size()) throw std::runtime_error("tiff: truncated file");

    Image16 img(height, width);
    size_t at = strip_offset;
    for (uint32_t row = 0; row < height; ++row)
        for (uint32_t col = 0; col < width; ++col) {
            img(row, col) = r.u16(at);
            at += 2;
        }
    return img;
}

}  // namespace thermadet::io
