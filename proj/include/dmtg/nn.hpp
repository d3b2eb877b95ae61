#pragma once

// Differentiable numeric kernels: dense layer, same-padded 1D convolution,
// group normalization, SiLU, pooling/upsampling, sinusoidal embeddings, Adam,
// and a central-finite-difference gradient checker. Reverse-mode gradients
// are written by hand per layer; grad_check is the module's acceptance gate.

#include <cmath>
#include <memory>
#include <vector>

#include "dmtg/rng.hpp"
#include "dmtg/tensor.hpp"

namespace dmtg::nn {

class Module {
  public:
    virtual ~Module() = default;
    virtual TensorBuf forward(const TensorBuf& x) = 0;
    /// Backward for the most recent forward; accumulates into param grads.
    virtual TensorBuf backward(const TensorBuf& grad_out) = 0;
    virtual std::vector<TensorBuf*> params() { return {}; }
    virtual std::vector<TensorBuf*> grads() { return {}; }
    virtual const char* name() const = 0;

    void zero_grad() {
        for (auto* g : grads()) g->fill(0.0);
    }

  protected:
    bool has_cache_{false};
    void require_cache() const {
        if (!has_cache_) throw std::logic_error("backward without matching forward");
    }
};

inline double silu(double x) {
    return x / (1.0 + std::exp(-x));
}
inline double silu_grad(double x) {
    const double s = 1.0 / (1.0 + std::exp(-x));
    return s * (1.0 + x * (1.0 - s));
}

/// y = x W^T + b over rows of a (batch, fan_in) input.
class Dense : public Module {
  public:
    Dense(std::size_t fan_in, std::size_t fan_out)
        : fan_in_(fan_in), fan_out_(fan_out),
          w_({fan_out, fan_in}), b_({fan_out}), gw_({fan_out, fan_in}), gb_({fan_out}) {}

    void init(Rng& rng) {
        const double lim = std::sqrt(6.0 / static_cast<double>(fan_in_));
        for (auto& v : w_.data) v = rng.uniform(-lim, lim);
        b_.fill(0.0);
    }

    TensorBuf forward(const TensorBuf& x) override {
        if (x.shape.size() != 2 || x.shape[1] != fan_in_)
            throw std::invalid_argument("Dense: bad input shape");
        x_ = x;
        has_cache_ = true;
        TensorBuf y({x.shape[0], fan_out_});
        for (std::size_t r = 0; r < x.shape[0]; ++r)
            for (std::size_t o = 0; o < fan_out_; ++o) {
                double acc = b_[o];
                for (std::size_t i = 0; i < fan_in_; ++i) acc += x.at2(r, i) * w_.at2(o, i);
                y.at2(r, o) = acc;
            }
        return y;
    }

    TensorBuf backward(const TensorBuf& g) override {
        require_cache();
        g.require_shape({x_.shape[0], fan_out_}, "Dense.backward");
        TensorBuf gx({x_.shape[0], fan_in_});
        for (std::size_t r = 0; r < x_.shape[0]; ++r)
            for (std::size_t o = 0; o < fan_out_; ++o) {
                const double go = g.at2(r, o);
                gb_[o] += go;
                for (std::size_t i = 0; i < fan_in_; ++i) {
                    gw_.at2(o, i) += go * x_.at2(r, i);
                    gx.at2(r, i) += go * w_.at2(o, i);
                }
            }
        return gx;
    }

    std::vector<TensorBuf*> params() override { return {&w_, &b_}; }
    std::vector<TensorBuf*> grads() override { return {&gw_, &gb_}; }
    const char* name() const override { return "Dense"; }

    TensorBuf& weight() { return w_; }
    TensorBuf& bias() { return b_; }

  private:
    std::size_t fan_in_, fan_out_;
    TensorBuf w_, b_, gw_, gb_;
    TensorBuf x_;
};

/// Same-padded stride-1 1D convolution over (batch, channels, length).
class Conv1D : public Module {
  public:
    Conv1D(std::size_t c_in, std::size_t c_out, std::size_t kernel = 3)
        : c_in_(c_in), c_out_(c_out), k_(kernel),
          w_({c_out, c_in, kernel}), b_({c_out}),
          gw_({c_out, c_in, kernel}), gb_({c_out}) {
        if (kernel % 2 == 0) throw std::invalid_argument("Conv1D: kernel must be odd");
    }

    void init(Rng& rng) {
        const double lim = std::sqrt(6.0 / static_cast<double>(c_in_ * k_));
        for (auto& v : w_.data) v = rng.uniform(-lim, lim);
        b_.fill(0.0);
    }

    TensorBuf forward(const TensorBuf& x) override {
        if (x.shape.size() != 3 || x.shape[1] != c_in_)
            throw std::invalid_argument("Conv1D: bad input shape");
        x_ = x;
        has_cache_ = true;
        const std::size_t B = x.shape[0], L = x.shape[2];
        const std::ptrdiff_t pad = static_cast<std::ptrdiff_t>(k_ / 2);
        TensorBuf y({B, c_out_, L});
        for (std::size_t b = 0; b < B; ++b)
            for (std::size_t co = 0; co < c_out_; ++co)
                for (std::size_t l = 0; l < L; ++l) {
                    double acc = b_[co];
                    for (std::size_t ci = 0; ci < c_in_; ++ci)
                        for (std::size_t t = 0; t < k_; ++t) {
                            const std::ptrdiff_t src =
                                static_cast<std::ptrdiff_t>(l) + static_cast<std::ptrdiff_t>(t) - pad;
                            if (src < 0 || src >= static_cast<std::ptrdiff_t>(L)) continue;
                            acc += x.at3(b, ci, static_cast<std::size_t>(src)) *
                                   w_.data[(co * c_in_ + ci) * k_ + t];
                        }
                    y.at3(b, co, l) = acc;
                }
        return y;
    }

    TensorBuf backward(const TensorBuf& g) override {
        require_cache();
        const std::size_t B = x_.shape[0], L = x_.shape[2];
        g.require_shape({B, c_out_, L}, "Conv1D.backward");
        const std::ptrdiff_t pad = static_cast<std::ptrdiff_t>(k_ / 2);
        TensorBuf gx({B, c_in_, L});
        for (std::size_t b = 0; b < B; ++b)
            for (std::size_t co = 0; co < c_out_; ++co)
                for (std::size_t l = 0; l < L; ++l) {
                    const double go = g.at3(b, co, l);
                    gb_[co] += go;
                    for (std::size_t ci = 0; ci < c_in_; ++ci)
                        for (std::size_t t = 0; t < k_; ++t) {
                            const std::ptrdiff_t src =
                                static_cast<std::ptrdiff_t>(l) + static_cast<std::ptrdiff_t>(t) - pad;
                            if (src < 0 || src >= static_cast<std::ptrdiff_t>(L)) continue;
                            gw_.data[(co * c_in_ + ci) * k_ + t] +=
                                go * x_.at3(b, ci, static_cast<std::size_t>(src));
                            gx.at3(b, ci, static_cast<std::size_t>(src)) +=
                                go * w_.data[(co * c_in_ + ci) * k_ + t];
                        }
                }
        return gx;
    }

    std::vector<TensorBuf*> params() override { return {&w_, &b_}; }
    std::vector<TensorBuf*> grads() override { return {&gw_, &gb_}; }
    const char* name() const override { return "Conv1D"; }

    TensorBuf& weight() { return w_; }
    TensorBuf& bias() { return b_; }

  private:
    std::size_t c_in_, c_out_, k_;
    TensorBuf w_, b_, gw_, gb_;
    TensorBuf x_;
};

/// Group normalization over (batch, channels, length) with per-channel affine.
class GroupNorm : public Module {
  public:
    GroupNorm(std::size_t groups, std::size_t channels, double eps = 1e-5)
        : groups_(groups), channels_(channels), eps_(eps),
          gamma_({channels}), beta_({channels}), ggamma_({channels}), gbeta_({channels}) {
        if (channels % groups != 0)
            throw std::invalid_argument("GroupNorm: channels not divisible by groups");
        gamma_.fill(1.0);
    }

    TensorBuf forward(const TensorBuf& x) override {
        if (x.shape.size() != 3 || x.shape[1] != channels_)
            throw std::invalid_argument("GroupNorm: bad input shape");
        x_ = x;
        has_cache_ = true;
        const std::size_t B = x.shape[0], L = x.shape[2], cg = channels_ / groups_;
        mu_.assign(B * groups_, 0.0);
        inv_sd_.assign(B * groups_, 0.0);
        TensorBuf y(x.shape);
        xhat_ = TensorBuf(x.shape);
        for (std::size_t b = 0; b < B; ++b)
            for (std::size_t g = 0; g < groups_; ++g) {
                const double n = static_cast<double>(cg * L);
                double mean = 0.0;
                for (std::size_t c = g * cg; c < (g + 1) * cg; ++c)
                    for (std::size_t l = 0; l < L; ++l) mean += x.at3(b, c, l);
                mean /= n;
                double var = 0.0;
                for (std::size_t c = g * cg; c < (g + 1) * cg; ++c)
                    for (std::size_t l = 0; l < L; ++l) {
                        const double d = x.at3(b, c, l) - mean;
                        var += d * d;
                    }
                var /= n;
                const double inv_sd = 1.0 / std::sqrt(var + eps_);
                mu_[b * groups_ + g] = mean;
                inv_sd_[b * groups_ + g] = inv_sd;
                for (std::size_t c = g * cg; c < (g + 1) * cg; ++c)
                    for (std::size_t l = 0; l < L; ++l) {
                        const double xh = (x.at3(b, c, l) - mean) * inv_sd;
                        xhat_.at3(b, c, l) = xh;
                        y.at3(b, c, l) = gamma_[c] * xh + beta_[c];
                    }
            }
        return y;
    }

    TensorBuf backward(const TensorBuf& g) override {
        require_cache();
        g.require_shape(x_.shape, "GroupNorm.backward");
        const std::size_t B = x_.shape[0], L = x_.shape[2], cg = channels_ / groups_;
        TensorBuf gx(x_.shape);
        for (std::size_t b = 0; b < B; ++b)
            for (std::size_t grp = 0; grp < groups_; ++grp) {
                const double n = static_cast<double>(cg * L);
                const double inv_sd = inv_sd_[b * groups_ + grp];
                double sum_dyg = 0.0, sum_dyg_xh = 0.0;
                for (std::size_t c = grp * cg; c < (grp + 1) * cg; ++c)
                    for (std::size_t l = 0; l < L; ++l) {
                        const double go = g.at3(b, c, l);
                        const double xh = xhat_.at3(b, c, l);
                        ggamma_[c] += go * xh;
                        gbeta_[c] += go;
                        const double dyg = go * gamma_[c];
                        sum_dyg += dyg;
                        sum_dyg_xh += dyg * xh;
                    }
                for (std::size_t c = grp * cg; c < (grp + 1) * cg; ++c)
                    for (std::size_t l = 0; l < L; ++l) {
                        const double dyg = g.at3(b, c, l) * gamma_[c];
                        const double xh = xhat_.at3(b, c, l);
                        gx.at3(b, c, l) =
                            inv_sd * (dyg - sum_dyg / n - xh * sum_dyg_xh / n);
                    }
            }
        return gx;
    }

    std::vector<TensorBuf*> params() override { return {&gamma_, &beta_}; }
    std::vector<TensorBuf*> grads() override { return {&ggamma_, &gbeta_}; }
    const char* name() const override { return "GroupNorm"; }

  private:
    std::size_t groups_, channels_;
    double eps_;
    TensorBuf gamma_, beta_, ggamma_, gbeta_;
    TensorBuf x_, xhat_;
    std::vector<double> mu_, inv_sd_;
};

class SiLU : public Module {
  public:
    TensorBuf forward(const TensorBuf& x) override {
        x_ = x;
        has_cache_ = true;
        TensorBuf y(x.shape);
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = silu(x[i]);
        return y;
    }
    TensorBuf backward(const TensorBuf& g) override {
        require_cache();
        g.require_shape(x_.shape, "SiLU.backward");
        TensorBuf gx(x_.shape);
        for (std::size_t i = 0; i < x_.size(); ++i) gx[i] = g[i] * silu_grad(x_[i]);
        return gx;
    }
    const char* name() const override { return "SiLU"; }

  private:
    TensorBuf x_;
};

/// Average pool, kernel 2 stride 2. Length must be even.
class Down2 : public Module {
  public:
    TensorBuf forward(const TensorBuf& x) override {
        if (x.shape.size() != 3 || x.shape[2] % 2 != 0)
            throw std::invalid_argument("Down2: length must be even");
        in_shape_ = x.shape;
        has_cache_ = true;
        TensorBuf y({x.shape[0], x.shape[1], x.shape[2] / 2});
        for (std::size_t b = 0; b < x.shape[0]; ++b)
            for (std::size_t c = 0; c < x.shape[1]; ++c)
                for (std::size_t l = 0; l < y.shape[2]; ++l)
                    y.at3(b, c, l) = 0.5 * (x.at3(b, c, 2 * l) + x.at3(b, c, 2 * l + 1));
        return y;
    }
    TensorBuf backward(const TensorBuf& g) override {
        require_cache();
        g.require_shape({in_shape_[0], in_shape_[1], in_shape_[2] / 2}, "Down2.backward");
        TensorBuf gx(in_shape_);
        for (std::size_t b = 0; b < in_shape_[0]; ++b)
            for (std::size_t c = 0; c < in_shape_[1]; ++c)
                for (std::size_t l = 0; l < g.shape[2]; ++l) {
                    gx.at3(b, c, 2 * l) = 0.5 * g.at3(b, c, l);
                    gx.at3(b, c, 2 * l + 1) = 0.5 * g.at3(b, c, l);
                }
        return gx;
    }
    const char* name() const override { return "Down2"; }

  private:
    std::vector<std::size_t> in_shape_;
};

/// Nearest-neighbour upsample by 2. Inverse of Down2 on the length axis.
class Up2 : public Module {
  public:
    TensorBuf forward(const TensorBuf& x) override {
        if (x.shape.size() != 3) throw std::invalid_argument("Up2: need 3D input");
        in_shape_ = x.shape;
        has_cache_ = true;
        TensorBuf y({x.shape[0], x.shape[1], x.shape[2] * 2});
        for (std::size_t b = 0; b < x.shape[0]; ++b)
            for (std::size_t c = 0; c < x.shape[1]; ++c)
                for (std::size_t l = 0; l < x.shape[2]; ++l) {
                    y.at3(b, c, 2 * l) = x.at3(b, c, l);
                    y.at3(b, c, 2 * l + 1) = x.at3(b, c, l);
                }
        return y;
    }
    TensorBuf backward(const TensorBuf& g) override {
        require_cache();
        g.require_shape({in_shape_[0], in_shape_[1], in_shape_[2] * 2}, "Up2.backward");
        TensorBuf gx(in_shape_);
        for (std::size_t b = 0; b < in_shape_[0]; ++b)
            for (std::size_t c = 0; c < in_shape_[1]; ++c)
                for (std::size_t l = 0; l < in_shape_[2]; ++l)
                    gx.at3(b, c, l) = g.at3(b, c, 2 * l) + g.at3(b, c, 2 * l + 1);
        return gx;
    }
    const char* name() const override { return "Up2"; }

  private:
    std::vector<std::size_t> in_shape_;
};

/// Interleaved sin/cos positional embedding with base 10000.
inline std::vector<double> sinusoid_embed(std::size_t index, std::size_t dim) {
    if (dim % 2 != 0) throw std::invalid_argument("sinusoid_embed: dim must be even");
    std::vector<double> out(dim);
    for (std::size_t i = 0; i < dim / 2; ++i) {
        const double freq =
            std::pow(10000.0, -2.0 * static_cast<double>(i) / static_cast<double>(dim));
        out[2 * i] = std::sin(static_cast<double>(index) * freq);
        out[2 * i + 1] = std::cos(static_cast<double>(index) * freq);
    }
    return out;
}

/// Style embedding: bucket alpha_bar in (0,1] into one of n_styles categories
/// and positionally encode the bucket index. Index clamped to [0, S-1].
inline std::vector<double> style_embed(double alpha_bar, std::size_t n_styles, std::size_t dim) {
    if (!(alpha_bar > 0.0) || alpha_bar > 1.0)
        throw std::invalid_argument("style_embed: alpha_bar out of (0,1]");
    if (n_styles < 2) throw std::invalid_argument("style_embed: need >= 2 styles");
    auto bucket = static_cast<std::size_t>(
        std::floor(alpha_bar * static_cast<double>(n_styles)));
    if (bucket >= n_styles) bucket = n_styles - 1;
    return sinusoid_embed(bucket, dim);
}

inline std::size_t style_bucket(double alpha_bar, std::size_t n_styles) {
    auto b = static_cast<std::size_t>(std::floor(alpha_bar * static_cast<double>(n_styles)));
    return b >= n_styles ? n_styles - 1 : b;
}

/// Standard Adam. State is owned here; step() pairs params with grads by index.
class Adam {
  public:
    explicit Adam(double lr = 1e-3, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
        : lr_(lr), b1_(beta1), b2_(beta2), eps_(eps) {}

    void step(const std::vector<TensorBuf*>& params, const std::vector<TensorBuf*>& grads) {
        if (params.size() != grads.size())
            throw std::invalid_argument("Adam: params/grads count mismatch");
        if (m_.empty()) {
            for (auto* p : params) {
                m_.emplace_back(p->shape);
                v_.emplace_back(p->shape);
            }
        }
        ++t_;
        const double bc1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
        for (std::size_t k = 0; k < params.size(); ++k) {
            auto& p = *params[k];
            auto& g = *grads[k];
            if (p.shape != g.shape) throw std::invalid_argument("Adam: shape mismatch");
            for (std::size_t i = 0; i < p.size(); ++i) {
                m_[k][i] = b1_ * m_[k][i] + (1.0 - b1_) * g[i];
                v_[k][i] = b2_ * v_[k][i] + (1.0 - b2_) * g[i] * g[i];
                const double mhat = m_[k][i] / bc1;
                const double vhat = v_[k][i] / bc2;
                p[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
            }
        }
    }

    [[nodiscard]] std::size_t steps() const { return t_; }

  private:
    double lr_, b1_, b2_, eps_;
    std::vector<TensorBuf> m_, v_;
    std::size_t t_{0};
};

/// Compare analytic gradients against central finite differences on random
/// inputs. Returns the max relative error over input and parameter entries.
inline double grad_check(Module& mod, const std::vector<std::size_t>& input_shape,
                         std::uint64_t seed, double h = 1e-5) {
    Rng rng(seed);
    TensorBuf x(input_shape);
    for (auto& v : x.data) v = rng.gaussian();
    for (auto* p : mod.params())
        for (auto& v : p->data) v = rng.gaussian(0.0, 0.5);

    // Scalar objective: weighted sum of outputs with fixed random weights.
    TensorBuf y0 = mod.forward(x);
    TensorBuf r(y0.shape);
    for (auto& v : r.data) v = rng.gaussian();

    auto objective = [&](const TensorBuf& in) {
        TensorBuf y = mod.forward(in);
        double s = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * r[i];
        return s;
    };

    mod.zero_grad();
    (void)mod.forward(x);
    TensorBuf gx = mod.backward(r);

    auto rel_err = [](double a, double n) {
        const double denom = std::max({1e-6, std::abs(a), std::abs(n)});
        return std::abs(a - n) / denom;
    };

    double worst = 0.0;
    auto stride_for = [](std::size_t n) { return n <= 512 ? std::size_t{1} : n / 256; };

    // input entries
    for (std::size_t i = 0; i < x.size(); i += stride_for(x.size())) {
        const double orig = x[i];
        x[i] = orig + h;
        const double fp = objective(x);
        x[i] = orig - h;
        const double fm = objective(x);
        x[i] = orig;
        worst = std::max(worst, rel_err(gx[i], (fp - fm) / (2.0 * h)));
    }
    // parameter entries
    auto ps = mod.params();
    auto gs = mod.grads();
    for (std::size_t k = 0; k < ps.size(); ++k) {
        auto& p = *ps[k];
        for (std::size_t i = 0; i < p.size(); i += stride_for(p.size())) {
            const double orig = p[i];
            p[i] = orig + h;
            const double fp = objective(x);
            p[i] = orig - h;
            const double fm = objective(x);
            p[i] = orig;
            worst = std::max(worst, rel_err((*gs[k])[i], (fp - fm) / (2.0 * h)));
        }
    }
    // restore cache consistency for the caller
    (void)mod.forward(x);
    return worst;
}

}  // namespace dmtg::nn
