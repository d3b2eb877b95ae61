#pragma once

// 1D U-Net noise predictor: A encoder stages conditioned on the time step,
// a middle block and A decoder stages conditioned on time step + style
// (complexity) embedding, with skip connections between stages of equal
// channel/length dimensions.

#include <map>
#include <memory>
#include <string>

#include "dmtg/nn.hpp"

#include <json.hpp>

namespace dmtg {

struct UNetConfig {
    std::size_t n_buf{96};      // sequence length (n_max + 1)
    std::size_t base_ch{16};
    std::size_t depth{2};       // A encoder / decoder stages
    std::size_t temb_dim{32};
    std::size_t semb_dim{32};
    std::size_t n_styles{20};
    std::size_t kernel{3};
    std::size_t groups{4};
    std::size_t in_ch{3};       // x, y, effective-node mask

    void validate() const {
        if (n_buf % (std::size_t{1} << depth) != 0)
            throw std::invalid_argument("UNetConfig: n_buf must be divisible by 2^depth");
        if (base_ch % groups != 0)
            throw std::invalid_argument("UNetConfig: base_ch must be divisible by groups");
    }
};

namespace nn {

/// Residual block: GN -> SiLU -> Conv -> (+ cond projection) -> GN -> SiLU
/// -> Conv, with an identity skip. Conditioning enters channel-wise after
/// the first convolution.
class ResBlock {
  public:
    ResBlock(std::size_t channels, std::size_t cond_dim, std::size_t groups, std::size_t kernel)
        : gn1_(groups, channels), gn2_(groups, channels),
          conv1_(channels, channels, kernel), conv2_(channels, channels, kernel),
          cond_proj_(cond_dim, channels), channels_(channels) {}

    void init(Rng& rng) {
        conv1_.init(rng);
        conv2_.init(rng);
        cond_proj_.init(rng);
    }

    TensorBuf forward(const TensorBuf& x, const TensorBuf& cond) {
        TensorBuf h = conv1_.forward(act1_.forward(gn1_.forward(x)));
        const TensorBuf c = cond_proj_.forward(cond);
        const std::size_t B = h.shape[0], L = h.shape[2];
        for (std::size_t b = 0; b < B; ++b)
            for (std::size_t ch = 0; ch < channels_; ++ch)
                for (std::size_t l = 0; l < L; ++l) h.at3(b, ch, l) += c.at2(b, ch);
        TensorBuf out = conv2_.forward(act2_.forward(gn2_.forward(h)));
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += x[i];
        return out;
    }

    TensorBuf backward(const TensorBuf& g) {
        TensorBuf gh = gn2_.backward(act2_.backward(conv2_.backward(g)));
        // conditioning branch: reduce over length
        const std::size_t B = gh.shape[0], L = gh.shape[2];
        TensorBuf gc({B, channels_});
        for (std::size_t b = 0; b < B; ++b)
            for (std::size_t ch = 0; ch < channels_; ++ch) {
                double s = 0.0;
                for (std::size_t l = 0; l < L; ++l) s += gh.at3(b, ch, l);
                gc.at2(b, ch) = s;
            }
        (void)cond_proj_.backward(gc);  // embedding inputs are fixed functions
        TensorBuf gx = gn1_.backward(act1_.backward(conv1_.backward(gh)));
        for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g[i];
        return gx;
    }

    void collect(std::map<std::string, TensorBuf*>& p, std::map<std::string, TensorBuf*>& g,
                 const std::string& prefix) {
        p[prefix + ".gn1.gamma"] = gn1_.params()[0];
        p[prefix + ".gn1.beta"] = gn1_.params()[1];
        p[prefix + ".gn2.gamma"] = gn2_.params()[0];
        p[prefix + ".gn2.beta"] = gn2_.params()[1];
        p[prefix + ".conv1.w"] = &conv1_.weight();
        p[prefix + ".conv1.b"] = &conv1_.bias();
        p[prefix + ".conv2.w"] = &conv2_.weight();
        p[prefix + ".conv2.b"] = &conv2_.bias();
        p[prefix + ".cond.w"] = &cond_proj_.weight();
        p[prefix + ".cond.b"] = &cond_proj_.bias();
        g[prefix + ".gn1.gamma"] = gn1_.grads()[0];
        g[prefix + ".gn1.beta"] = gn1_.grads()[1];
        g[prefix + ".gn2.gamma"] = gn2_.grads()[0];
        g[prefix + ".gn2.beta"] = gn2_.grads()[1];
        g[prefix + ".conv1.w"] = conv1_.grads()[0];
        g[prefix + ".conv1.b"] = conv1_.grads()[1];
        g[prefix + ".conv2.w"] = conv2_.grads()[0];
        g[prefix + ".conv2.b"] = conv2_.grads()[1];
        g[prefix + ".cond.w"] = cond_proj_.grads()[0];
        g[prefix + ".cond.b"] = cond_proj_.grads()[1];
    }

  private:
    GroupNorm gn1_, gn2_;
    SiLU act1_, act2_;
    Conv1D conv1_, conv2_;
    Dense cond_proj_;
    std::size_t channels_;
};

}  // namespace nn

/// The denoiser f_theta(x_t, t, alpha_bar) -> predicted noise (B, 2, L).
class UNet {
  public:
    explicit UNet(UNetConfig cfg) : cfg_(cfg) {
        cfg_.validate();
        const std::size_t cond_enc = cfg_.temb_dim;
        const std::size_t cond_dec = cfg_.temb_dim + cfg_.semb_dim;
        stem_ = std::make_unique<nn::Conv1D>(cfg_.in_ch, ch(0), cfg_.kernel);
        for (std::size_t s = 0; s < cfg_.depth; ++s) {
            enc_.push_back(std::make_unique<nn::ResBlock>(ch(s), cond_enc, cfg_.groups, cfg_.kernel));
            down_.push_back(std::make_unique<nn::Down2>());
            down_conv_.push_back(std::make_unique<nn::Conv1D>(ch(s), ch(s + 1), cfg_.kernel));
        }
        mid_ = std::make_unique<nn::ResBlock>(ch(cfg_.depth), cond_dec, cfg_.groups, cfg_.kernel);
        for (std::size_t s = cfg_.depth; s-- > 0;) {
            up_.push_back(std::make_unique<nn::Up2>());
            up_conv_.push_back(std::make_unique<nn::Conv1D>(ch(s + 1), ch(s), cfg_.kernel));
            dec_.push_back(std::make_unique<nn::ResBlock>(ch(s), cond_dec, cfg_.groups, cfg_.kernel));
        }
        out_gn_ = std::make_unique<nn::GroupNorm>(cfg_.groups, ch(0));
        out_conv_ = std::make_unique<nn::Conv1D>(ch(0), 2, cfg_.kernel);
        index_params();
    }

    void init(std::uint64_t seed) {
        Rng rng(seed);
        stem_->init(rng);
        for (auto& b : enc_) b->init(rng);
        for (auto& c : down_conv_) c->init(rng);
        mid_->init(rng);
        for (auto& c : up_conv_) c->init(rng);
        for (auto& b : dec_) b->init(rng);
        out_conv_->init(rng);
        // zero-initialized output head: the untrained net predicts zero noise
        out_conv_->weight().fill(0.0);
        out_conv_->bias().fill(0.0);
    }

    /// t_index: per-sample diffusion step; alpha_bar: per-sample style target.
    TensorBuf forward(const TensorBuf& x, const std::vector<std::size_t>& t_index,
                      const std::vector<double>& alpha_bar) {
        const std::size_t B = x.shape[0];
        x.require_shape({B, cfg_.in_ch, cfg_.n_buf}, "UNet.forward");
        if (t_index.size() != B || alpha_bar.size() != B)
            throw std::invalid_argument("UNet.forward: conditioning batch mismatch");

        TensorBuf cond_t({B, cfg_.temb_dim});
        TensorBuf cond_ts({B, cfg_.temb_dim + cfg_.semb_dim});
        for (std::size_t b = 0; b < B; ++b) {
            const auto te = nn::sinusoid_embed(t_index[b], cfg_.temb_dim);
            const auto se = nn::style_embed(alpha_bar[b], cfg_.n_styles, cfg_.semb_dim);
            for (std::size_t i = 0; i < cfg_.temb_dim; ++i) {
                cond_t.at2(b, i) = te[i];
                cond_ts.at2(b, i) = te[i];
            }
            for (std::size_t i = 0; i < cfg_.semb_dim; ++i)
                cond_ts.at2(b, cfg_.temb_dim + i) = se[i];
        }
        cond_t_ = cond_t;
        cond_ts_ = cond_ts;

        TensorBuf h = stem_->forward(x);
        skips_.clear();
        for (std::size_t s = 0; s < cfg_.depth; ++s) {
            h = enc_[s]->forward(h, cond_t_);
            skips_.push_back(h);
            h = down_conv_[s]->forward(down_[s]->forward(h));
        }
        h = mid_->forward(h, cond_ts_);
        for (std::size_t i = 0; i < cfg_.depth; ++i) {
            h = up_conv_[i]->forward(up_[i]->forward(h));
            const TensorBuf& skip = skips_[cfg_.depth - 1 - i];
            for (std::size_t j = 0; j < h.size(); ++j) h[j] += skip[j];
            h = dec_[i]->forward(h, cond_ts_);
        }
        return out_conv_->forward(out_act_.forward(out_gn_->forward(h)));
    }

    TensorBuf backward(const TensorBuf& grad_out) {
        TensorBuf g = out_gn_->backward(out_act_.backward(out_conv_->backward(grad_out)));
        std::vector<TensorBuf> skip_grads(cfg_.depth);
        for (std::size_t i = cfg_.depth; i-- > 0;) {
            g = dec_[i]->backward(g);
            skip_grads[cfg_.depth - 1 - i] = g;  // skip addition branches here
            g = up_[i]->backward(up_conv_[i]->backward(g));
        }
        g = mid_->backward(g);
        for (std::size_t s = cfg_.depth; s-- > 0;) {
            g = down_[s]->backward(down_conv_[s]->backward(g));
            const TensorBuf& sg = skip_grads[s];
            for (std::size_t j = 0; j < g.size(); ++j) g[j] += sg[j];
            g = enc_[s]->backward(g);
        }
        return stem_->backward(g);
    }

    void zero_grad() {
        for (auto& [k, g] : grad_index_) g->fill(0.0);
    }

    std::vector<TensorBuf*> params() {
        std::vector<TensorBuf*> out;
        for (auto& [k, p] : param_index_) out.push_back(p);
        return out;
    }
    std::vector<TensorBuf*> grads() {
        std::vector<TensorBuf*> out;
        for (auto& [k, g] : grad_index_) out.push_back(g);
        return out;
    }
    const std::map<std::string, TensorBuf*>& named_params() const { return param_index_; }
    [[nodiscard]] std::size_t param_count() const {
        std::size_t n = 0;
        for (const auto& [k, p] : param_index_) n += p->size();
        return n;
    }
    [[nodiscard]] const UNetConfig& config() const { return cfg_; }

    [[nodiscard]] nlohmann::json to_json() const {
        nlohmann::json j;
        j["schema"] = "dmtg-ckpt-v1";
        j["config"] = {{"n_buf", cfg_.n_buf},     {"base_ch", cfg_.base_ch},
                       {"depth", cfg_.depth},     {"temb_dim", cfg_.temb_dim},
                       {"semb_dim", cfg_.semb_dim}, {"n_styles", cfg_.n_styles},
                       {"kernel", cfg_.kernel},   {"groups", cfg_.groups},
                       {"in_ch", cfg_.in_ch}};
        nlohmann::json params = nlohmann::json::object();
        for (const auto& [k, p] : param_index_) {
            params[k] = {{"shape", p->shape}, {"data", p->data}};
        }
        j["params"] = params;
        return j;
    }

    static UNet from_json(const nlohmann::json& j) {
        if (j.value("schema", "") != "dmtg-ckpt-v1")
            throw std::invalid_argument("checkpoint: unknown schema");
        const auto& c = j.at("config");
        UNetConfig cfg;
        cfg.n_buf = c.at("n_buf");
        cfg.base_ch = c.at("base_ch");
        cfg.depth = c.at("depth");
        cfg.temb_dim = c.at("temb_dim");
        cfg.semb_dim = c.at("semb_dim");
        cfg.n_styles = c.at("n_styles");
        cfg.kernel = c.at("kernel");
        cfg.groups = c.at("groups");
        cfg.in_ch = c.at("in_ch");
        UNet net(cfg);
        for (auto& [k, p] : net.param_index_) {
            const auto& entry = j.at("params").at(k);
            const std::vector<std::size_t> shape = entry.at("shape");
            if (shape != p->shape) throw std::invalid_argument("checkpoint: shape mismatch at " + k);
            p->data = entry.at("data").get<std::vector<double>>();
        }
        return net;
    }

  private:
    [[nodiscard]] std::size_t ch(std::size_t stage) const { return cfg_.base_ch << stage; }

    void index_params() {
        auto add = [&](const std::string& n, nn::Conv1D& c) {
            param_index_[n + ".w"] = &c.weight();
            param_index_[n + ".b"] = &c.bias();
            grad_index_[n + ".w"] = c.grads()[0];
            grad_index_[n + ".b"] = c.grads()[1];
        };
        add("stem", *stem_);
        for (std::size_t s = 0; s < cfg_.depth; ++s) {
            enc_[s]->collect(param_index_, grad_index_, "enc" + std::to_string(s));
            add("down" + std::to_string(s), *down_conv_[s]);
        }
        mid_->collect(param_index_, grad_index_, "mid");
        for (std::size_t i = 0; i < cfg_.depth; ++i) {
            add("up" + std::to_string(i), *up_conv_[i]);
            dec_[i]->collect(param_index_, grad_index_, "dec" + std::to_string(i));
        }
        param_index_["out_gn.gamma"] = out_gn_->params()[0];
        param_index_["out_gn.beta"] = out_gn_->params()[1];
        grad_index_["out_gn.gamma"] = out_gn_->grads()[0];
        grad_index_["out_gn.beta"] = out_gn_->grads()[1];
        add("out", *out_conv_);
    }

    UNetConfig cfg_;
    std::unique_ptr<nn::Conv1D> stem_;
    std::vector<std::unique_ptr<nn::ResBlock>> enc_, dec_;
    std::vector<std::unique_ptr<nn::Down2>> down_;
    std::vector<std::unique_ptr<nn::Up2>> up_;
    std::vector<std::unique_ptr<nn::Conv1D>> down_conv_, up_conv_;
    std::unique_ptr<nn::ResBlock> mid_;
    std::unique_ptr<nn::GroupNorm> out_gn_;
    nn::SiLU out_act_;
    std::unique_ptr<nn::Conv1D> out_conv_;
    std::map<std::string, TensorBuf*> param_index_, grad_index_;
    TensorBuf cond_t_, cond_ts_;
    std::vector<TensorBuf> skips_;
};

}  // namespace dmtg
