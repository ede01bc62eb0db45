#include "thermadet/detector.hpp"

namespace thermadet::det {

namespace {

// Moore neighborhood, clockwise starting East.
constexpr int kDr[8] = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr int kDc[8] = {1, 1, 0, -1, -1, -1, 0, 1};

struct Pt {
    int r, c;
    bool operator==(const Pt& o) const { return r == o.r && c == o.c; }
};

int direction_of(const Pt& from, const Pt& to) {
    for (int d = 0; d < 8; ++d)
        if (from.r + kDr[d] == to.r && from.c + kDc[d] == to.c) return d;
    throw std::logic_error("contour trace: pixels not adjacent");
}

// Outer border of the component containing `start`, whose west neighbor is
// known to be background. Moore-neighbor tracing, Jacob stopping criterion.
std::vector<Pt> trace_border(const BinaryImage& bin, const Pt& start) {
    const int h = static_cast<int>(bin.rows());
    const int w = static_cast<int>(bin.cols());
    const auto fg = [&](const Pt& p) {
        return p.r >= 0 && p.r < h && p.c >= 0 && p.c < w && bin(p.r, p.c) != 0;
    };

    std::vector<Pt> path{start};
    Pt p = start;
    Pt b{start.r, start.c - 1};  // entry backtrack: the background to the west
    const Pt start_p = p, start_b = b;

    const long guard = 4L * h * w + 16;
    for (long iter = 0; iter < guard; ++iter) {
        const int bd = direction_of(p, b);
        bool moved = false;
        for (int i = 1; i <= 8; ++i) {
            const int d = (bd + i) % 8;
            const Pt q{p.r + kDr[d], p.c + kDc[d]};
            if (fg(q)) {
                if (i > 1) {
                    const int prev = (bd + i - 1) % 8;
                    b = Pt{p.r + kDr[prev], p.c + kDc[prev]};
                }
                p = q;
                moved = true;
                break;
            }
        }
        if (!moved) break;  // isolated pixel
        if (p == start_p && b == start_b) break;
        path.push_back(p);
    }
    return path;
}

}  // namespace

RegionSet contour_regions(const BinaryImage& binary) {
    const int h = static_cast<int>(binary.rows());
    const int w = static_cast<int>(binary.cols());
    RegionSet out;
    out.height = h;
    out.width = w;
    if (h == 0 || w == 0) return out;

    BinaryImage assigned = BinaryImage::Zero(h, w);

    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (binary(r, c) == 0 || assigned(r, c)) continue;

            // First unassigned foreground pixel in raster order: it lies on a
            // new top-level outer border (anything nested inside an earlier
            // region was already swallowed by its fill).
            const auto path = trace_border(binary, {r, c});

            // Bounding box of the contour with a one-pixel margin; flood the
            // margin inward through everything except contour pixels. What
            // remains unreached is enclosed by (or on) the contour.
            int r0 = h, r1 = -1, c0 = w, c1 = -1;
            for (const auto& p : path) {
                r0 = std::min(r0, p.r);
                r1 = std::max(r1, p.r);
                c0 = std::min(c0, p.c);
                c1 = std::max(c1, p.c);
            }
            --r0, --c0, ++r1, ++c1;
            const int bh = r1 - r0 + 1, bw = c1 - c0 + 1;
            std::vector<uint8_t> on_path(static_cast<size_t>(bh) * bw, 0);
            for (const auto& p : path) on_path[static_cast<size_t>(p.r - r0) * bw + (p.c - c0)] = 1;

            std::vector<uint8_t> outside(static_cast<size_t>(bh) * bw, 0);
            std::vector<std::pair<int, int>> stack;
            for (int br = 0; br < bh; ++br)
                for (int bc = 0; bc < bw; ++bc)
                    if ((br == 0 || br == bh - 1 || bc == 0 || bc == bw - 1) &&
                        !on_path[static_cast<size_t>(br) * bw + bc] &&
                        !outside[static_cast<size_t>(br) * bw + bc]) {
                        outside[static_cast<size_t>(br) * bw + bc] = 1;
                        stack.push_back({br, bc});
                    }
            while (!stack.empty()) {
                const auto [br, bc] = stack.back();
                stack.pop_back();
                const int dr[] = {-1, 1, 0, 0}, dc[] = {0, 0, -1, 1};
                for (int d = 0; d < 4; ++d) {
                    const int nr = br + dr[d], nc = bc + dc[d];
                    if (nr < 0 || nr >= bh || nc < 0 || nc >= bw) continue;
                    const size_t idx = static_cast<size_t>(nr) * bw + nc;
                    if (!on_path[idx] && !outside[idx]) {
                        outside[idx] = 1;
                        stack.push_back({nr, nc});
                    }
                }
            }

            Region region;
            for (int br = 0; br < bh; ++br)
                for (int bc = 0; bc < bw; ++bc) {
                    const int gr = r0 + br, gc = c0 + bc;
                    if (gr < 0 || gr >= h || gc < 0 || gc >= w) continue;
                    if (!outside[static_cast<size_t>(br) * bw + bc]) {
                        region.pixels.push_back(gr * w + gc);
                        assigned(gr, gc) = 1;
                    }
                }
            region.contour.reserve(path.size());
            for (const auto& p : path) region.contour.push_back({p.r, p.c});
            out.regions.push_back(std::move(region));
        }
    }
    return out;
}

}  // namespace thermadet::det
