#pragma once

#include "thermadet/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace thermadet::nn {

template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

// Central parameter store: every layer registers named tensors here and
// keeps integer handles. Gradient and optimizer-state stores mirror the
// layout, which keeps Adam, serialization, gradient checks and the
// deterministic cross-thread reduction all trivial.
template <typename S>
struct TensorStore {
    std::vector<std::string> names;
    std::vector<Mat<S>> tensors;

    int add(const std::string& name, Eigen::Index rows, Eigen::Index cols) {
        names.push_back(name);
        tensors.push_back(Mat<S>::Zero(rows, cols));
        return static_cast<int>(tensors.size()) - 1;
    }

    Mat<S>& operator[](int h) { return tensors[static_cast<size_t>(h)]; }
    const Mat<S>& operator[](int h) const { return tensors[static_cast<size_t>(h)]; }

    TensorStore zeros_like() const {
        TensorStore g;
        g.names = names;
        g.tensors.reserve(tensors.size());
        for (const auto& m : tensors) g.tensors.push_back(Mat<S>::Zero(m.rows(), m.cols()));
        return g;
    }

    void set_zero() {
        for (auto& m : tensors) m.setZero();
    }

    void add_scaled(const TensorStore& other, S scale) {
        for (size_t i = 0; i < tensors.size(); ++i) tensors[i] += scale * other.tensors[i];
    }

    double squared_norm() const {
        double n = 0.0;
        for (const auto& m : tensors) n += static_cast<double>(m.squaredNorm());
        return n;
    }

    Eigen::Index param_count() const {
        Eigen::Index n = 0;
        for (const auto& m : tensors) n += m.size();
        return n;
    }
};

// ---------------------------------------------------------------------------
// Activations; generic over Eigen expressions, returned evaluated.

template <typename Derived>
auto elu(const Eigen::MatrixBase<Derived>& x) {
    using S = typename Derived::Scalar;
    return x.unaryExpr([](S v) { return v > S(0) ? v : S(std::expm1(static_cast<double>(v))); }).eval();
}

// Gradient of elu given the activated output (y = elu(x)): 1 for y > 0, y + 1 otherwise.
template <typename Derived>
auto elu_grad_from_output(const Eigen::MatrixBase<Derived>& y) {
    using S = typename Derived::Scalar;
    return y.unaryExpr([](S v) { return v > S(0) ? S(1) : v + S(1); }).eval();
}

template <typename Derived>
auto sigmoid(const Eigen::MatrixBase<Derived>& x) {
    using S = typename Derived::Scalar;
    return x.unaryExpr([](S v) { return S(1) / (S(1) + S(std::exp(-static_cast<double>(v)))); }).eval();
}

// Hard clamp with pass-through gradient strictly inside the bounds.
template <typename Derived>
auto clamp(const Eigen::MatrixBase<Derived>& x, double lo, double hi) {
    using S = typename Derived::Scalar;
    return x.cwiseMax(S(lo)).cwiseMin(S(hi)).eval();
}

template <typename Derived>
auto clamp_grad_mask(const Eigen::MatrixBase<Derived>& x, double lo, double hi) {
    using S = typename Derived::Scalar;
    return x.unaryExpr([lo, hi](S v) { return (v > S(lo) && v < S(hi)) ? S(1) : S(0); }).eval();
}

// ---------------------------------------------------------------------------
// im2col / col2im for a conv mapping grid (hi, wi) -> (ho, wo)

struct ConvGeom {
    int channels = 0;
    int hi = 0, wi = 0;  // source grid
    int ho = 0, wo = 0;  // destination grid (where the kernel slides)
    int k = 3, stride = 2, pad = 1;
};

template <typename S>
Mat<S> im2col(const Mat<S>& x, const ConvGeom& g) {
    Mat<S> cols = Mat<S>::Zero(static_cast<Eigen::Index>(g.channels) * g.k * g.k,
                               static_cast<Eigen::Index>(g.ho) * g.wo);
    for (int oy = 0; oy < g.ho; ++oy)
        for (int ox = 0; ox < g.wo; ++ox) {
            const Eigen::Index col = static_cast<Eigen::Index>(oy) * g.wo + ox;
            for (int dy = 0; dy < g.k; ++dy) {
                const int iy = oy * g.stride - g.pad + dy;
                if (iy < 0 || iy >= g.hi) continue;
                for (int dx = 0; dx < g.k; ++dx) {
                    const int ix = ox * g.stride - g.pad + dx;
                    if (ix < 0 || ix >= g.wi) continue;
                    const Eigen::Index ipos = static_cast<Eigen::Index>(iy) * g.wi + ix;
                    for (int c = 0; c < g.channels; ++c)
                        cols(static_cast<Eigen::Index>(c) * g.k * g.k + dy * g.k + dx, col) = x(c, ipos);
                }
            }
        }
    return cols;
}

template <typename S>
Mat<S> col2im(const Mat<S>& cols, const ConvGeom& g) {
    Mat<S> x = Mat<S>::Zero(g.channels, static_cast<Eigen::Index>(g.hi) * g.wi);
    for (int oy = 0; oy < g.ho; ++oy)
        for (int ox = 0; ox < g.wo; ++ox) {
            const Eigen::Index col = static_cast<Eigen::Index>(oy) * g.wo + ox;
            for (int dy = 0; dy < g.k; ++dy) {
                const int iy = oy * g.stride - g.pad + dy;
                if (iy < 0 || iy >= g.hi) continue;
                for (int dx = 0; dx < g.k; ++dx) {
                    const int ix = ox * g.stride - g.pad + dx;
                    if (ix < 0 || ix >= g.wi) continue;
                    const Eigen::Index ipos = static_cast<Eigen::Index>(iy) * g.wi + ix;
                    for (int c = 0; c < g.channels; ++c)
                        x(c, ipos) += cols(static_cast<Eigen::Index>(c) * g.k * g.k + dy * g.k + dx, col);
                }
            }
        }
    return x;
}

// ---------------------------------------------------------------------------
// Layers. Parameters live in the shared store; forward/backward are const and
// write activations into caller-owned caches, so one model instance can serve
// multiple worker threads.

template <typename S>
struct Dense {
    int w = -1, b = -1;
    int in = 0, out = 0;

    Dense() = default;
    Dense(TensorStore<S>& ps, const std::string& prefix, int in_dim, int out_dim) : in(in_dim), out(out_dim) {
        w = ps.add(prefix + ".w", out_dim, in_dim);
        b = ps.add(prefix + ".b", out_dim, 1);
    }

    void init(TensorStore<S>& ps, Rng& rng, double scale = -1.0) const {
        const double sd = scale > 0.0 ? scale : std::sqrt(2.0 / in);
        for (Eigen::Index i = 0; i < ps[w].size(); ++i) ps[w].data()[i] = static_cast<S>(sd * rng.normal());
        ps[b].setZero();
    }

    Vec<S> forward(const TensorStore<S>& ps, const Vec<S>& x) const { return ps[w] * x + ps[b]; }

    Vec<S> backward(const TensorStore<S>& ps, TensorStore<S>& gs, const Vec<S>& x_cache, const Vec<S>& gy) const {
        gs[w].noalias() += gy * x_cache.transpose();
        gs[b] += gy;
        return ps[w].transpose() * gy;
    }
};

template <typename S>
struct Conv2d {
    int w = -1, b = -1;
    ConvGeom geom;  // geom.channels = input channels; slides over (ho, wo)
    int co = 0;

    Conv2d() = default;
    Conv2d(TensorStore<S>& ps, const std::string& prefix, int ci, int co_, const ConvGeom& g) : geom(g), co(co_) {
        geom.channels = ci;
        w = ps.add(prefix + ".w", co, static_cast<Eigen::Index>(ci) * g.k * g.k);
        b = ps.add(prefix + ".b", co, 1);
    }

    void init(TensorStore<S>& ps, Rng& rng) const {
        const double sd = std::sqrt(2.0 / static_cast<double>(geom.channels * geom.k * geom.k));
        for (Eigen::Index i = 0; i < ps[w].size(); ++i) ps[w].data()[i] = static_cast<S>(sd * rng.normal());
        ps[b].setZero();
    }

    // x: (ci, hi*wi) -> (co, ho*wo); cols_cache receives the im2col matrix.
    Mat<S> forward(const TensorStore<S>& ps, const Mat<S>& x, Mat<S>& cols_cache) const {
        cols_cache = im2col(x, geom);
        Mat<S> y = ps[w] * cols_cache;
        y.colwise() += ps[b].col(0);
        return y;
    }

    Mat<S> backward(const TensorStore<S>& ps, TensorStore<S>& gs, const Mat<S>& cols_cache, const Mat<S>& gy) const {
        gs[w].noalias() += gy * cols_cache.transpose();
        gs[b].col(0) += gy.rowwise().sum();
        const Mat<S> gcols = ps[w].transpose() * gy;
        return col2im(gcols, geom);
    }
};

// Transposed convolution: exact adjoint of a Conv2d sliding over the *input*
// grid. With k=3, stride=2, pad=1 it maps (hi, wi) to (2*hi, 2*wi).
template <typename S>
struct ConvT2d {
    int w = -1, b = -1;
    ConvGeom geom;  // geom.channels = output channels; hi/wi = big grid, ho/wo = small grid
    int ci = 0;

    ConvT2d() = default;
    ConvT2d(TensorStore<S>& ps, const std::string& prefix, int ci_, int co, int hi_small, int wi_small, int k,
            int stride, int pad)
        : ci(ci_) {
        geom.channels = co;
        geom.ho = hi_small;
        geom.wo = wi_small;
        geom.hi = hi_small * stride;
        geom.wi = wi_small * stride;
        geom.k = k;
        geom.stride = stride;
        geom.pad = pad;
        w = ps.add(prefix + ".w", ci, static_cast<Eigen::Index>(co) * k * k);
        b = ps.add(prefix + ".b", co, 1);
    }

    int out_pixels() const { return geom.hi * geom.wi; }

    void init(TensorStore<S>& ps, Rng& rng) const {
        const double sd = std::sqrt(2.0 / static_cast<double>(ci * geom.k * geom.k));
        for (Eigen::Index i = 0; i < ps[w].size(); ++i) ps[w].data()[i] = static_cast<S>(sd * rng.normal());
        ps[b].setZero();
    }

    // u: (ci, ho*wo) small grid -> (co, hi*wi) big grid; u is the cache.
    Mat<S> forward(const TensorStore<S>& ps, const Mat<S>& u, Mat<S>& u_cache) const {
        u_cache = u;
        const Mat<S> cols = ps[w].transpose() * u;  // (co*k*k, ho*wo)
        Mat<S> y = col2im(cols, geom);
        y.colwise() += ps[b].col(0);
        return y;
    }

    Mat<S> backward(const TensorStore<S>& ps, TensorStore<S>& gs, const Mat<S>& u_cache, const Mat<S>& gy) const {
        const Mat<S> gcols = im2col(gy, geom);  // (co*k*k, ho*wo)
        gs[w].noalias() += u_cache * gcols.transpose();
        gs[b].col(0) += gy.rowwise().sum();
        return ps[w] * gcols;
    }
};

template <typename S>
struct LstmCell {
    int wx = -1, wh = -1, b = -1;
    int in = 0, hidden = 0;

    struct StepCache {
        Vec<S> x, h_prev, c_prev;
        Vec<S> i, f, g, o, c;
    };

    LstmCell() = default;
    LstmCell(TensorStore<S>& ps, const std::string& prefix, int in_dim, int hidden_dim)
        : in(in_dim), hidden(hidden_dim) {
        wx = ps.add(prefix + ".wx", 4 * hidden_dim, in_dim);
        wh = ps.add(prefix + ".wh", 4 * hidden_dim, hidden_dim);
        b = ps.add(prefix + ".b", 4 * hidden_dim, 1);
    }

    void init(TensorStore<S>& ps, Rng& rng) const {
        const double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
        for (int h : {wx, wh})
            for (Eigen::Index i = 0; i < ps[h].size(); ++i)
                ps[h].data()[i] = static_cast<S>(rng.uniform(-bound, bound));
        ps[b].setZero();
        // forget-gate bias at 1 helps gradient flow early in training
        ps[b].col(0).segment(hidden, hidden).setConstant(S(1));
    }

    void forward(const TensorStore<S>& ps, const Vec<S>& x, Vec<S>& h, Vec<S>& c, StepCache& cache) const {
        cache.x = x;
        cache.h_prev = h;
        cache.c_prev = c;
        Vec<S> a = ps[wx] * x + ps[wh] * h + ps[b];
        const auto seg = [&](int j) { return a.segment(j * hidden, hidden); };
        cache.i = sigmoid(seg(0));
        cache.f = sigmoid(seg(1));
        cache.g = seg(2).array().tanh().matrix();
        cache.o = sigmoid(seg(3));
        c = cache.f.cwiseProduct(cache.c_prev) + cache.i.cwiseProduct(cache.g);
        cache.c = c;
        h = cache.o.cwiseProduct(c.array().tanh().matrix());
    }

    // dh/dc are the carries flowing backward in time; updated in place to the
    // previous step's carries. Returns gradient w.r.t. x.
    Vec<S> backward(const TensorStore<S>& ps, TensorStore<S>& gs, const StepCache& cache, Vec<S>& dh,
                    Vec<S>& dc) const {
        const Vec<S> tc = cache.c.array().tanh().matrix();
        const Vec<S> d_o = dh.cwiseProduct(tc);
        dc += dh.cwiseProduct(cache.o)
                  .cwiseProduct((Vec<S>::Ones(hidden) - tc.cwiseProduct(tc)));
        const Vec<S> d_i = dc.cwiseProduct(cache.g);
        const Vec<S> d_f = dc.cwiseProduct(cache.c_prev);
        const Vec<S> d_g = dc.cwiseProduct(cache.i);
        const Vec<S> dc_prev = dc.cwiseProduct(cache.f);

        Vec<S> da(4 * hidden);
        da.segment(0, hidden) = d_i.cwiseProduct(cache.i).cwiseProduct(Vec<S>::Ones(hidden) - cache.i);
        da.segment(hidden, hidden) = d_f.cwiseProduct(cache.f).cwiseProduct(Vec<S>::Ones(hidden) - cache.f);
        da.segment(2 * hidden, hidden) = d_g.cwiseProduct(Vec<S>::Ones(hidden) - cache.g.cwiseProduct(cache.g));
        da.segment(3 * hidden, hidden) = d_o.cwiseProduct(cache.o).cwiseProduct(Vec<S>::Ones(hidden) - cache.o);

        gs[wx].noalias() += da * cache.x.transpose();
        gs[wh].noalias() += da * cache.h_prev.transpose();
        gs[b] += da;

        dh = ps[wh].transpose() * da;
        dc = dc_prev;
        return ps[wx].transpose() * da;
    }
};

}  // namespace thermadet::nn
