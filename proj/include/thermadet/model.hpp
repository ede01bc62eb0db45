#pragma once

#include "thermadet/nn.hpp"

#include <array>
#include <optional>

namespace thermadet::model {

using nn::Mat;
using nn::Vec;

enum class Variant { AE, CVAE, BetaCVAE, PCVAE };

inline const char* variant_name(Variant v) {
    switch (v) {
        case Variant::AE: return "AE";
        case Variant::CVAE: return "CVAE";
        case Variant::BetaCVAE: return "BetaCVAE";
        default: return "PCVAE";
    }
}

inline Variant variant_from_name(const std::string& s) {
    if (s == "AE") return Variant::AE;
    if (s == "CVAE") return Variant::CVAE;
    if (s == "BetaCVAE") return Variant::BetaCVAE;
    if (s == "PCVAE") return Variant::PCVAE;
    throw std::invalid_argument("unknown model variant: " + s);
}

// KL weight per variant: CVAE trains with beta = 1, BetaCVAE with a small
// beta (default 1e-4, i.e. an assumed observation SD of 0.01).
inline double default_beta(Variant v) { return v == Variant::BetaCVAE ? 1e-4 : 1.0; }

struct ModelConfig {
    int height = 32;
    int width = 32;
    std::array<int, 3> conv_channels{16, 32, 64};
    int kernel = 3;
    int stride = 2;
    int hidden_dim = 128;
    int latent_dim = 8;
    int cond_map_channels = 2;
    int cond_vec_dim = 8;
    Variant variant = Variant::BetaCVAE;
    double beta = 1e-4;
    double logvar_clamp = 10.0;
    // When set, CVAE/BetaCVAE compute the reconstruction term as a constant-
    // sigma Gaussian NLL with sigma^2 = beta instead of the scaled squared
    // error. The two are the same objective up to an additive constant.
    bool gaussian_nll_form = false;

    int pixels() const { return height * width; }
    int downsampled(int dim) const { return dim / (stride * stride * stride); }
    int encoder_feature_dim() const { return conv_channels[2] * downsampled(height) * downsampled(width); }
    bool has_latent_variance() const { return variant != Variant::AE; }
    bool has_observation_variance() const { return variant == Variant::PCVAE; }

    void validate() const {
        const int factor = stride * stride * stride;
        if (height % factor != 0 || width % factor != 0)
            throw std::invalid_argument("ModelConfig: height and width must be divisible by stride^3");
        if (latent_dim < 1 || hidden_dim < 1) throw std::invalid_argument("ModelConfig: bad dimensions");
        if (!(beta > 0.0)) throw std::invalid_argument("ModelConfig: beta must be > 0");
    }
};

// ---------------------------------------------------------------------------
// Free functions shared by losses, scoring and tests.

// KL(N(mu, sigma^2) || N(0, 1)) summed over coordinates.
template <typename S>
S kl_divergence(const Vec<S>& mu, const Vec<S>& logvar) {
    return S(0.5) * (mu.array().square() + logvar.array().exp() - S(1) - logvar.array()).sum();
}

template <typename S>
Vec<S> reparameterize(const Vec<S>& mu, const Vec<S>& logvar, const Vec<S>& eps) {
    return (mu.array() + (logvar.array() * S(0.5)).exp() * eps.array()).matrix();
}

// Gaussian log-likelihood with a constant observation SD, summed over pixels.
template <typename S>
double gaussian_log_likelihood(const Eigen::Ref<const Mat<S>>& x, const Eigen::Ref<const Mat<S>>& mean,
                               double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_log_likelihood: sigma must be positive");
    const double inv_two_var = 1.0 / (2.0 * sigma * sigma);
    const double log_norm = std::log(sigma * std::sqrt(2.0 * 3.14159265358979323846));
    const double sq = (x - mean).template cast<double>().squaredNorm();
    return -sq * inv_two_var - log_norm * static_cast<double>(x.size());
}

// Gaussian log-likelihood with a per-pixel log-variance map.
template <typename S>
double gaussian_log_likelihood(const Eigen::Ref<const Mat<S>>& x, const Eigen::Ref<const Mat<S>>& mean,
                               const Eigen::Ref<const Mat<S>>& logvar) {
    const auto xd = x.template cast<double>().array();
    const auto md = mean.template cast<double>().array();
    const auto lv = logvar.template cast<double>().array();
    const double half_log_two_pi = 0.5 * std::log(2.0 * 3.14159265358979323846);
    return (-(xd - md).square() / (2.0 * lv.exp()) - 0.5 * lv - half_log_two_pi).sum();
}

// ---------------------------------------------------------------------------

// Conditional CNN-LSTM encoder-decoder over a window of T frames.
//
// Encoder: per frame, [frame ; condition map] -> 3 strided conv layers (ELU)
// -> LSTM -> linear head(s) for the per-step posterior. Decoder: per step,
// [z_t ; condition vector] -> linear -> 3 transposed convs (ELU) -> sigmoid
// mean (+ clamped log-variance head for PCVAE).
//
// The instance is immutable during forward/backward; all activations go into
// a caller-owned Forward, so scoring workers can share one model.
template <typename S>
class SeqVae {
  public:
    using MatS = Mat<S>;
    using VecS = Vec<S>;

    // Everything produced by one pass, plus the caches backward() needs.
    struct Forward {
        MatS mu, logvar;       // (T, latent)
        MatS z;                // (T, latent)
        MatS recon_mean;       // (T, pixels)
        MatS recon_logvar;     // (T, pixels); PCVAE only
        MatS eps;              // (T, latent); empty for a mean pass / AE
        MatS latent_mask;      // clamp pass-through mask
        MatS obs_mask;

        // caches
        std::array<std::vector<MatS>, 3> enc_cols;
        std::array<std::vector<MatS>, 3> enc_act;
        std::vector<typename nn::LstmCell<S>::StepCache> lstm_steps;
        MatS hidden_states;            // (T, hidden)
        std::vector<VecS> dec_in;      // (latent + cond_vec) per step
        std::vector<VecS> dec_seed;    // activated dense output per step
        std::array<std::vector<MatS>, 3> dec_u;   // transposed-conv input caches
        std::array<std::vector<MatS>, 2> dec_act; // ELU outputs after deconv 1, 2
    };

    explicit SeqVae(ModelConfig cfg) : cfg_(cfg) {
        cfg_.validate();
        const int in_ch = 1 + cfg_.cond_map_channels;
        const int h = cfg_.height, w = cfg_.width;
        const int h1 = h / cfg_.stride, w1 = w / cfg_.stride;
        const int h2 = h1 / cfg_.stride, w2 = w1 / cfg_.stride;
        const int h3 = h2 / cfg_.stride, w3 = w2 / cfg_.stride;

        auto geom = [&](int hi, int wi, int ho, int wo) {
            nn::ConvGeom g;
            g.hi = hi, g.wi = wi, g.ho = ho, g.wo = wo;
            g.k = cfg_.kernel, g.stride = cfg_.stride;
            g.pad = cfg_.kernel / 2;
            return g;
        };

        enc_conv_[0] = nn::Conv2d<S>(params_, "enc.conv1", in_ch, cfg_.conv_channels[0], geom(h, w, h1, w1));
        enc_conv_[1] = nn::Conv2d<S>(params_, "enc.conv2", cfg_.conv_channels[0], cfg_.conv_channels[1],
                                     geom(h1, w1, h2, w2));
        enc_conv_[2] = nn::Conv2d<S>(params_, "enc.conv3", cfg_.conv_channels[1], cfg_.conv_channels[2],
                                     geom(h2, w2, h3, w3));
        lstm_ = nn::LstmCell<S>(params_, "enc.lstm", cfg_.encoder_feature_dim(), cfg_.hidden_dim);
        head_mu_ = nn::Dense<S>(params_, "enc.head_mu", cfg_.hidden_dim, cfg_.latent_dim);
        if (cfg_.has_latent_variance())
            head_logvar_ = nn::Dense<S>(params_, "enc.head_logvar", cfg_.hidden_dim, cfg_.latent_dim);

        dec_dense_ = nn::Dense<S>(params_, "dec.dense", cfg_.latent_dim + cfg_.cond_vec_dim,
                                  cfg_.encoder_feature_dim());
        dec_convt_[0] = nn::ConvT2d<S>(params_, "dec.convt1", cfg_.conv_channels[2], cfg_.conv_channels[1], h3, w3,
                                       cfg_.kernel, cfg_.stride, cfg_.kernel / 2);
        dec_convt_[1] = nn::ConvT2d<S>(params_, "dec.convt2", cfg_.conv_channels[1], cfg_.conv_channels[0], h2, w2,
                                       cfg_.kernel, cfg_.stride, cfg_.kernel / 2);
        const int out_ch = cfg_.has_observation_variance() ? 2 : 1;
        dec_convt_[2] = nn::ConvT2d<S>(params_, "dec.convt3", cfg_.conv_channels[0], out_ch, h1, w1, cfg_.kernel,
                                       cfg_.stride, cfg_.kernel / 2);
        shape_ = {h3, w3};
    }

    void init_params(uint64_t seed) {
        Rng rng(derive_seed(seed, 0x696e6974));
        for (auto& c : enc_conv_) c.init(params_, rng);
        lstm_.init(params_, rng);
        head_mu_.init(params_, rng, 0.05);
        if (cfg_.has_latent_variance()) head_logvar_.init(params_, rng, 0.05);
        dec_dense_.init(params_, rng);
        for (auto& c : dec_convt_) c.init(params_, rng);
    }

    const ModelConfig& config() const { return cfg_; }
    nn::TensorStore<S>& params() { return params_; }
    const nn::TensorStore<S>& params() const { return params_; }

    // frames: (T, pixels); cond_map: (cond channels, pixels); cond_vec: (8).
    // eps: (T, latent) reparameterization noise, or nullptr for z = mu.
    void forward(const MatS& frames, const MatS& cond_map, const VecS& cond_vec, const MatS* eps,
                 Forward& fw) const {
        const auto T = frames.rows();
        const int P = cfg_.pixels();
        if (frames.cols() != P) throw std::invalid_argument("forward: frame pixel count mismatch");
        if (cond_map.rows() != cfg_.cond_map_channels || cond_map.cols() != P)
            throw std::invalid_argument("forward: condition map shape mismatch");
        if (cond_vec.size() != cfg_.cond_vec_dim) throw std::invalid_argument("forward: condition vector mismatch");
        if (eps && (eps->rows() != T || eps->cols() != cfg_.latent_dim))
            throw std::invalid_argument("forward: noise shape mismatch");

        resize_forward(fw, T);
        fw.eps = eps ? *eps : MatS();

        VecS h = VecS::Zero(cfg_.hidden_dim);
        VecS c = VecS::Zero(cfg_.hidden_dim);
        MatS x(1 + cfg_.cond_map_channels, P);
        x.bottomRows(cfg_.cond_map_channels) = cond_map;

        for (Eigen::Index t = 0; t < T; ++t) {
            x.row(0) = frames.row(t);
            MatS a = x;
            for (int l = 0; l < 3; ++l) {
                a = nn::elu(enc_conv_[l].forward(params_, a, fw.enc_cols[l][t]));
                fw.enc_act[l][t] = a;
            }
            const VecS flat = Eigen::Map<const VecS>(a.data(), a.size());
            lstm_.forward(params_, flat, h, c, fw.lstm_steps[t]);
            fw.hidden_states.row(t) = h.transpose();

            fw.mu.row(t) = head_mu_.forward(params_, h).transpose();
            if (cfg_.has_latent_variance()) {
                const VecS raw = head_logvar_.forward(params_, h);
                const double cl = cfg_.logvar_clamp;
                fw.logvar.row(t) = nn::clamp(raw, -cl, cl).transpose();
                fw.latent_mask.row(t) = nn::clamp_grad_mask(raw, -cl, cl).transpose();
                if (eps)
                    fw.z.row(t) = reparameterize<S>(fw.mu.row(t).transpose(), fw.logvar.row(t).transpose(),
                                                    eps->row(t).transpose())
                                      .transpose();
                else
                    fw.z.row(t) = fw.mu.row(t);
            } else {
                fw.z.row(t) = fw.mu.row(t);
            }

            decode_step(t, cond_vec, fw);
        }
    }

    // Decoder only, for a given latent sample; used by the reconstruction
    // probability estimate. Writes recon rows of `fw` for step t.
    void decode_step(Eigen::Index t, const VecS& cond_vec, Forward& fw) const {
        VecS din(cfg_.latent_dim + cfg_.cond_vec_dim);
        din.head(cfg_.latent_dim) = fw.z.row(t).transpose();
        din.tail(cfg_.cond_vec_dim) = cond_vec;
        fw.dec_in[t] = din;

        const VecS seed_raw = dec_dense_.forward(params_, din);
        const VecS seed = nn::elu(seed_raw);
        fw.dec_seed[t] = seed;

        MatS a = Eigen::Map<const MatS>(seed.data(), cfg_.conv_channels[2], shape_.first * shape_.second);
        a = nn::elu(dec_convt_[0].forward(params_, a, fw.dec_u[0][t]));
        fw.dec_act[0][t] = a;
        a = nn::elu(dec_convt_[1].forward(params_, a, fw.dec_u[1][t]));
        fw.dec_act[1][t] = a;
        const MatS out = dec_convt_[2].forward(params_, a, fw.dec_u[2][t]);

        fw.recon_mean.row(t) = nn::sigmoid(out.row(0));
        if (cfg_.has_observation_variance()) {
            const double cl = cfg_.logvar_clamp;
            fw.recon_logvar.row(t) = nn::clamp(out.row(1), -cl, cl);
            fw.obs_mask.row(t) = nn::clamp_grad_mask(out.row(1), -cl, cl);
        }
    }

    struct LossBreakdown {
        double total = 0.0;
        double reconstruction = 0.0;
        double kl = 0.0;
    };

    // Mean over time steps of the per-step loss:
    //   AE:            ||x - m||^2
    //   CVAE/BetaCVAE: ||x - m||^2 / (2 beta) + KL
    //   PCVAE:         -log N(x | m, exp(lv)) + KL
    LossBreakdown total_loss(const MatS& frames, const Forward& fw) const {
        const auto T = frames.rows();
        LossBreakdown lb;
        for (Eigen::Index t = 0; t < T; ++t) {
            double rec;
            if (cfg_.variant == Variant::PCVAE)
                rec = -gaussian_log_likelihood<S>(frames.row(t), fw.recon_mean.row(t), fw.recon_logvar.row(t));
            else if (cfg_.variant != Variant::AE && cfg_.gaussian_nll_form)
                rec = -gaussian_log_likelihood<S>(frames.row(t), fw.recon_mean.row(t), std::sqrt(cfg_.beta));
            else {
                const double sq = (frames.row(t) - fw.recon_mean.row(t)).template cast<double>().squaredNorm();
                rec = cfg_.variant == Variant::AE ? sq : sq / (2.0 * cfg_.beta);
            }
            lb.reconstruction += rec;
            if (cfg_.has_latent_variance())
                lb.kl += static_cast<double>(
                    kl_divergence<S>(fw.mu.row(t).transpose(), fw.logvar.row(t).transpose()));
        }
        lb.reconstruction /= static_cast<double>(T);
        lb.kl /= static_cast<double>(T);
        lb.total = lb.reconstruction + lb.kl;
        return lb;
    }

    // Accumulates d total_loss / d params into `grads` (which must mirror
    // params()). Must be called with the Forward of the same inputs.
    void backward(const MatS& frames, const Forward& fw, nn::TensorStore<S>& grads) const {
        const auto T = frames.rows();
        const S invT = S(1) / static_cast<S>(T);
        const bool sampled = fw.eps.size() > 0;

        VecS dh_carry = VecS::Zero(cfg_.hidden_dim);
        VecS dc_carry = VecS::Zero(cfg_.hidden_dim);
        MatS d_features(T, cfg_.encoder_feature_dim());

        for (Eigen::Index t = T - 1; t >= 0; --t) {
            // loss gradient w.r.t. decoder outputs
            MatS d_out = MatS::Zero(cfg_.has_observation_variance() ? 2 : 1, cfg_.pixels());
            const MatS diff = (fw.recon_mean.row(t) - frames.row(t));
            MatS d_mean;
            switch (cfg_.variant) {
                case Variant::AE: d_mean = S(2) * invT * diff; break;
                case Variant::PCVAE:
                    d_mean = (invT * diff.array() * (-fw.recon_logvar.row(t).array()).exp()).matrix();
                    break;
                default:
                    if (cfg_.gaussian_nll_form) {
                        const S sigma = static_cast<S>(std::sqrt(cfg_.beta));
                        d_mean = (invT / (sigma * sigma)) * diff;
                    } else {
                        d_mean = (invT / static_cast<S>(cfg_.beta)) * diff;
                    }
                    break;
            }
            // through the sigmoid
            d_out.row(0) = (d_mean.array() * fw.recon_mean.row(t).array() *
                            (S(1) - fw.recon_mean.row(t).array()))
                               .matrix();
            if (cfg_.has_observation_variance()) {
                const auto lv = fw.recon_logvar.row(t).array();
                const MatS d_lv =
                    (invT * (S(0.5) - diff.array().square() * S(0.5) * (-lv).exp())).matrix();
                d_out.row(1) = (d_lv.array() * fw.obs_mask.row(t).array()).matrix();
            }

            // decoder stack
            MatS g = dec_convt_[2].backward(params_, grads, fw.dec_u[2][t], d_out);
            g = (g.array() * nn::elu_grad_from_output(fw.dec_act[1][t]).array()).matrix();
            g = dec_convt_[1].backward(params_, grads, fw.dec_u[1][t], g);
            g = (g.array() * nn::elu_grad_from_output(fw.dec_act[0][t]).array()).matrix();
            g = dec_convt_[0].backward(params_, grads, fw.dec_u[0][t], g);

            VecS d_seed = Eigen::Map<const VecS>(g.data(), g.size());
            d_seed = (d_seed.array() * nn::elu_grad_from_output(fw.dec_seed[t]).array()).matrix();
            const VecS d_din = dec_dense_.backward(params_, grads, fw.dec_in[t], d_seed);
            const VecS dz = d_din.head(cfg_.latent_dim);

            // latent gradients: reparameterization + KL
            VecS d_mu = dz;
            VecS d_lv = VecS::Zero(cfg_.latent_dim);
            if (cfg_.has_latent_variance()) {
                if (sampled)
                    d_lv += (dz.array() * fw.eps.row(t).transpose().array() * S(0.5) *
                             (fw.logvar.row(t).transpose().array() * S(0.5)).exp())
                                .matrix();
                d_mu += invT * fw.mu.row(t).transpose();
                d_lv += (invT * S(0.5) * (fw.logvar.row(t).transpose().array().exp() - S(1))).matrix();
                d_lv = (d_lv.array() * fw.latent_mask.row(t).transpose().array()).matrix();
            }

            const VecS h_t = fw.hidden_states.row(t).transpose();
            VecS dh = head_mu_.backward(params_, grads, h_t, d_mu);
            if (cfg_.has_latent_variance()) dh += head_logvar_.backward(params_, grads, h_t, d_lv);

            dh += dh_carry;
            d_features.row(t) = lstm_.backward(params_, grads, fw.lstm_steps[t], dh, dc_carry).transpose();
            dh_carry = dh;
        }

        // encoder conv stack, any order
        for (Eigen::Index t = 0; t < T; ++t) {
            const VecS row = d_features.row(t).transpose();
            MatS g = Eigen::Map<const MatS>(row.data(), cfg_.conv_channels[2], shape_.first * shape_.second);
            for (int l = 2; l >= 0; --l) {
                g = (g.array() * nn::elu_grad_from_output(fw.enc_act[l][t]).array()).matrix();
                g = enc_conv_[l].backward(params_, grads, fw.enc_cols[l][t], g);
            }
        }
    }

    // Monte-Carlo estimate of the expected log-likelihood per time step.
    // Requires the PCVAE observation-variance head.
    VecS reconstruction_probability(const MatS& frames, const MatS& cond_map, const VecS& cond_vec, int n_samples,
                                    Rng& rng, Forward& fw) const {
        if (!cfg_.has_observation_variance())
            throw std::invalid_argument("reconstruction_probability: model has no observation variance head");
        if (n_samples < 1) throw std::invalid_argument("reconstruction_probability: need at least one sample");

        forward(frames, cond_map, cond_vec, nullptr, fw);  // posterior parameters
        const auto T = frames.rows();
        VecS acc = VecS::Zero(T);
        for (int l = 0; l < n_samples; ++l) {
            for (Eigen::Index t = 0; t < T; ++t) {
                VecS eps(cfg_.latent_dim);
                for (int j = 0; j < cfg_.latent_dim; ++j) eps(j) = static_cast<S>(rng.normal());
                fw.z.row(t) =
                    reparameterize<S>(fw.mu.row(t).transpose(), fw.logvar.row(t).transpose(), eps).transpose();
                decode_step(t, cond_vec, fw);
                acc(t) += static_cast<S>(
                    gaussian_log_likelihood<S>(frames.row(t), fw.recon_mean.row(t), fw.recon_logvar.row(t)));
            }
        }
        return acc / static_cast<S>(n_samples);
    }

  private:
    void resize_forward(Forward& fw, Eigen::Index T) const {
        const auto L = cfg_.latent_dim;
        const auto P = cfg_.pixels();
        fw.mu.resize(T, L);
        fw.logvar = cfg_.has_latent_variance() ? MatS(MatS::Zero(T, L)) : MatS();
        fw.latent_mask = cfg_.has_latent_variance() ? MatS(MatS::Ones(T, L)) : MatS();
        fw.z.resize(T, L);
        fw.recon_mean.resize(T, P);
        fw.recon_logvar = cfg_.has_observation_variance() ? MatS(MatS::Zero(T, P)) : MatS();
        fw.obs_mask = cfg_.has_observation_variance() ? MatS(MatS::Ones(T, P)) : MatS();
        for (auto& v : fw.enc_cols) v.resize(T);
        for (auto& v : fw.enc_act) v.resize(T);
        fw.lstm_steps.resize(T);
        fw.hidden_states.resize(T, cfg_.hidden_dim);
        fw.dec_in.resize(T);
        fw.dec_seed.resize(T);
        for (auto& v : fw.dec_u) v.resize(T);
        for (auto& v : fw.dec_act) v.resize(T);
    }

    ModelConfig cfg_;
    nn::TensorStore<S> params_;
    std::array<nn::Conv2d<S>, 3> enc_conv_;
    nn::LstmCell<S> lstm_;
    nn::Dense<S> head_mu_, head_logvar_;
    nn::Dense<S> dec_dense_;
    std::array<nn::ConvT2d<S>, 3> dec_convt_;
    std::pair<int, int> shape_;  // most-downsampled grid
};

}  // namespace thermadet::model
