#pragma once

// Binary human-vs-model discriminators over kinematic feature vectors, plus
// the independent and unified evaluation protocols and the report type.

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dmtg/features.hpp"
#include "dmtg/metrics.hpp"
#include "dmtg/nn.hpp"
#include "dmtg/rng.hpp"

namespace dmtg {

enum class DiscKind { Tree, Logistic, Mlp };

inline const char* disc_kind_name(DiscKind k) {
    switch (k) {
        case DiscKind::Tree: return "tree";
        case DiscKind::Logistic: return "logistic";
        case DiscKind::Mlp: return "mlp";
    }
    return "?";
}

struct DiscMetrics {
    double accuracy{0.0};
    double macro_precision{0.0};
    double macro_recall{0.0};
    double macro_f1{0.0};
};

/// Macro-averaged binary metrics from predicted/true label vectors (1 = positive).
inline DiscMetrics metrics_from_labels(const std::vector<int>& y_true,
                                       const std::vector<int>& y_pred) {
    if (y_true.size() != y_pred.size() || y_true.empty())
        throw std::invalid_argument("metrics_from_labels: size mismatch or empty");
    double tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] == 1 && y_pred[i] == 1) ++tp;
        else if (y_true[i] == 0 && y_pred[i] == 1) ++fp;
        else if (y_true[i] == 1 && y_pred[i] == 0) ++fn;
        else ++tn;
    }
    auto safe = [](double num, double den) { return den > 0.0 ? num / den : 0.0; };
    const double p1 = safe(tp, tp + fp), r1 = safe(tp, tp + fn);
    const double p0 = safe(tn, tn + fn), r0 = safe(tn, tn + fp);
    const double f1_1 = safe(2.0 * p1 * r1, p1 + r1);
    const double f1_0 = safe(2.0 * p0 * r0, p0 + r0);
    DiscMetrics m;
    m.accuracy = (tp + tn) / static_cast<double>(y_true.size());
    m.macro_precision = 0.5 * (p0 + p1);
    m.macro_recall = 0.5 * (r0 + r1);
    m.macro_f1 = 0.5 * (f1_0 + f1_1);
    return m;
}

class Discriminator {
  public:
    virtual ~Discriminator() = default;
    virtual void fit(const std::vector<FeatureVec>& x, const std::vector<int>& y, Rng& rng) = 0;
    virtual int predict(const FeatureVec& f) const = 0;
};

// ---- decision tree ----------------------------------------------------------

class DecisionTree : public Discriminator {
  public:
    explicit DecisionTree(std::size_t max_depth = 6, std::size_t min_leaf = 5)
        : max_depth_(max_depth), min_leaf_(min_leaf) {}

    void fit(const std::vector<FeatureVec>& x, const std::vector<int>& y, Rng&) override {
        nodes_.clear();
        std::vector<std::size_t> idx(x.size());
        std::iota(idx.begin(), idx.end(), 0);
        build(x, y, idx, 0);
    }

    int predict(const FeatureVec& f) const override {
        std::size_t n = 0;
        while (!nodes_[n].leaf)
            n = f[nodes_[n].feature] <= nodes_[n].threshold ? nodes_[n].left : nodes_[n].right;
        return nodes_[n].label;
    }

  private:
    struct Node {
        bool leaf{true};
        int label{0};
        std::size_t feature{0};
        double threshold{0.0};
        std::size_t left{0}, right{0};
    };

    static double gini(const std::vector<int>& y, const std::vector<std::size_t>& idx) {
        if (idx.empty()) return 0.0;
        double pos = 0.0;
        for (auto i : idx) pos += y[i];
        const double p = pos / static_cast<double>(idx.size());
        return 2.0 * p * (1.0 - p);
    }

    std::size_t build(const std::vector<FeatureVec>& x, const std::vector<int>& y,
                      const std::vector<std::size_t>& idx, std::size_t depth) {
        const std::size_t me = nodes_.size();
        nodes_.emplace_back();
        double pos = 0.0;
        for (auto i : idx) pos += y[i];
        nodes_[me].label = pos * 2.0 >= static_cast<double>(idx.size()) ? 1 : 0;
        if (depth >= max_depth_ || idx.size() < 2 * min_leaf_ || gini(y, idx) == 0.0)
            return me;

        double best_gain = 1e-12;
        std::size_t best_f = 0;
        double best_thr = 0.0;
        const double parent = gini(y, idx) * static_cast<double>(idx.size());
        for (std::size_t f = 0; f < kFeatureDim; ++f) {
            std::vector<std::size_t> order = idx;
            std::sort(order.begin(), order.end(),
                      [&](std::size_t a, std::size_t b) { return x[a][f] < x[b][f]; });
            double lpos = 0.0, rpos = 0.0;
            for (auto i : order) rpos += y[i];
            for (std::size_t k = 0; k + 1 < order.size(); ++k) {
                lpos += y[order[k]];
                rpos -= y[order[k]];
                if (x[order[k]][f] == x[order[k + 1]][f]) continue;
                const double nl = static_cast<double>(k + 1);
                const double nr = static_cast<double>(order.size() - k - 1);
                if (nl < static_cast<double>(min_leaf_) || nr < static_cast<double>(min_leaf_))
                    continue;
                const double pl = lpos / nl, pr = rpos / nr;
                const double child = 2.0 * pl * (1.0 - pl) * nl + 2.0 * pr * (1.0 - pr) * nr;
                const double gain = parent - child;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_f = f;
                    best_thr = 0.5 * (x[order[k]][f] + x[order[k + 1]][f]);
                }
            }
        }
        if (best_gain <= 1e-12) return me;

        std::vector<std::size_t> li, ri;
        for (auto i : idx) (x[i][best_f] <= best_thr ? li : ri).push_back(i);
        if (li.empty() || ri.empty()) return me;
        nodes_[me].leaf = false;
        nodes_[me].feature = best_f;
        nodes_[me].threshold = best_thr;
        const std::size_t l = build(x, y, li, depth + 1);
        const std::size_t r = build(x, y, ri, depth + 1);
        nodes_[me].left = l;
        nodes_[me].right = r;
        return me;
    }

    std::size_t max_depth_, min_leaf_;
    std::vector<Node> nodes_;
};

// ---- feature standardization ------------------------------------------------

struct Standardizer {
    std::array<double, kFeatureDim> mean{}, sd{};

    void fit(const std::vector<FeatureVec>& x) {
        mean.fill(0.0);
        sd.fill(0.0);
        for (const auto& f : x)
            for (std::size_t i = 0; i < kFeatureDim; ++i) mean[i] += f[i];
        for (auto& v : mean) v /= static_cast<double>(x.size());
        for (const auto& f : x)
            for (std::size_t i = 0; i < kFeatureDim; ++i) {
                const double d = f[i] - mean[i];
                sd[i] += d * d;
            }
        for (auto& v : sd) v = std::max(std::sqrt(v / static_cast<double>(x.size())), 1e-9);
    }

    FeatureVec apply(const FeatureVec& f) const {
        FeatureVec out;
        for (std::size_t i = 0; i < kFeatureDim; ++i) out[i] = (f[i] - mean[i]) / sd[i];
        return out;
    }
};

// ---- logistic regression ----------------------------------------------------

class LogisticRegression : public Discriminator {
  public:
    explicit LogisticRegression(double lr = 0.1, std::size_t epochs = 400)
        : lr_(lr), epochs_(epochs) {}

    void fit(const std::vector<FeatureVec>& x, const std::vector<int>& y, Rng&) override {
        std_.fit(x);
        std::vector<FeatureVec> z(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) z[i] = std_.apply(x[i]);
        w_.fill(0.0);
        b_ = 0.0;
        const double n = static_cast<double>(x.size());
        for (std::size_t ep = 0; ep < epochs_; ++ep) {
            std::array<double, kFeatureDim> gw{};
            double gb = 0.0;
            for (std::size_t i = 0; i < z.size(); ++i) {
                double s = b_;
                for (std::size_t k = 0; k < kFeatureDim; ++k) s += w_[k] * z[i][k];
                const double p = 1.0 / (1.0 + std::exp(-s));
                const double d = p - static_cast<double>(y[i]);
                for (std::size_t k = 0; k < kFeatureDim; ++k) gw[k] += d * z[i][k];
                gb += d;
            }
            for (std::size_t k = 0; k < kFeatureDim; ++k) w_[k] -= lr_ * gw[k] / n;
            b_ -= lr_ * gb / n;
        }
    }

    int predict(const FeatureVec& f) const override {
        const FeatureVec z = std_.apply(f);
        double s = b_;
        for (std::size_t k = 0; k < kFeatureDim; ++k) s += w_[k] * z[k];
        return s >= 0.0 ? 1 : 0;
    }

  private:
    double lr_;
    std::size_t epochs_;
    Standardizer std_;
    std::array<double, kFeatureDim> w_{};
    double b_{0.0};
};

// ---- MLP --------------------------------------------------------------------

class MlpDiscriminator : public Discriminator {
  public:
    explicit MlpDiscriminator(std::size_t hidden = 32, std::size_t epochs = 80,
                              double lr = 1e-2, std::size_t batch = 32)
        : hidden_(hidden), epochs_(epochs), lr_(lr), batch_(batch),
          l1_(kFeatureDim, hidden), l2_(hidden, 1) {}

    void fit(const std::vector<FeatureVec>& x, const std::vector<int>& y, Rng& rng) override {
        std_.fit(x);
        l1_.init(rng);
        l2_.init(rng);
        nn::Adam opt(lr_);
        std::vector<std::size_t> order(x.size());
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t ep = 0; ep < epochs_; ++ep) {
            for (std::size_t i = order.size(); i > 1; --i)
                std::swap(order[i - 1], order[rng.index(i)]);
            for (std::size_t b0 = 0; b0 < order.size(); b0 += batch_) {
                const std::size_t bs = std::min(batch_, order.size() - b0);
                TensorBuf in({bs, kFeatureDim});
                for (std::size_t r = 0; r < bs; ++r) {
                    const FeatureVec z = std_.apply(x[order[b0 + r]]);
                    for (std::size_t k = 0; k < kFeatureDim; ++k) in.at2(r, k) = z[k];
                }
                l1_.zero_grad();
                l2_.zero_grad();
                TensorBuf h = l1_.forward(in);
                TensorBuf a(h.shape);
                for (std::size_t i = 0; i < h.size(); ++i) a[i] = nn::silu(h[i]);
                TensorBuf logit = l2_.forward(a);
                // BCE-with-logits gradient: sigmoid(z) - y
                TensorBuf g(logit.shape);
                for (std::size_t r = 0; r < bs; ++r) {
                    const double p = 1.0 / (1.0 + std::exp(-logit.at2(r, 0)));
                    g.at2(r, 0) =
                        (p - static_cast<double>(y[order[b0 + r]])) / static_cast<double>(bs);
                }
                TensorBuf ga = l2_.backward(g);
                for (std::size_t i = 0; i < ga.size(); ++i) ga[i] *= nn::silu_grad(h[i]);
                l1_.backward(ga);
                auto params = l1_.params();
                auto grads = l1_.grads();
                for (auto* p : l2_.params()) params.push_back(p);
                for (auto* p : l2_.grads()) grads.push_back(p);
                opt.step(params, grads);
            }
        }
    }

    int predict(const FeatureVec& f) const override {
        const FeatureVec z = std_.apply(f);
        double logit = l2_.bias()[0];
        for (std::size_t h = 0; h < hidden_; ++h) {
            double s = l1_.bias()[h];
            for (std::size_t k = 0; k < kFeatureDim; ++k) s += l1_.weight().at2(h, k) * z[k];
            logit += l2_.weight().at2(0, h) * nn::silu(s);
        }
        return logit >= 0.0 ? 1 : 0;
    }

  private:
    std::size_t hidden_, epochs_;
    double lr_;
    std::size_t batch_;
    Standardizer std_;
    mutable nn::Dense l1_, l2_;
};

inline std::unique_ptr<Discriminator> make_discriminator(DiscKind kind) {
    switch (kind) {
        case DiscKind::Tree: return std::make_unique<DecisionTree>();
        case DiscKind::Logistic: return std::make_unique<LogisticRegression>();
        case DiscKind::Mlp: return std::make_unique<MlpDiscriminator>();
    }
    throw std::invalid_argument("make_discriminator: unknown kind");
}

// ---- train/test -------------------------------------------------------------

/// Fits one discriminator on a stratified 7:3 split of positive (= class 1,
/// conventionally human) vs negative feature sets and reports held-out metrics.
inline DiscMetrics train_discriminator(const std::vector<FeatureVec>& pos,
                                       const std::vector<FeatureVec>& neg, DiscKind kind,
                                       std::uint64_t seed = 1) {
    if (pos.size() < 50 || neg.size() < 50)
        throw std::invalid_argument("train_discriminator: need >= 50 samples per class");
    Rng rng(seed);
    auto shuffled = [&](std::size_t n) {
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng.index(i)]);
        return idx;
    };
    const auto pi = shuffled(pos.size());
    const auto ni = shuffled(neg.size());
    const std::size_t ptr = pos.size() * 7 / 10, ntr = neg.size() * 7 / 10;

    std::vector<FeatureVec> xtr, xte;
    std::vector<int> ytr, yte;
    for (std::size_t i = 0; i < pos.size(); ++i) {
        (i < ptr ? xtr : xte).push_back(pos[pi[i]]);
        (i < ptr ? ytr : yte).push_back(1);
    }
    for (std::size_t i = 0; i < neg.size(); ++i) {
        (i < ntr ? xtr : xte).push_back(neg[ni[i]]);
        (i < ntr ? ytr : yte).push_back(0);
    }
    auto model = make_discriminator(kind);
    Rng fit_rng(Rng::derive(seed, 101));
    model->fit(xtr, ytr, fit_rng);
    std::vector<int> pred;
    pred.reserve(xte.size());
    for (const auto& f : xte) pred.push_back(model->predict(f));
    return metrics_from_labels(yte, pred);
}

// ---- report -----------------------------------------------------------------

struct EvalReport {
    std::optional<double> jsd;
    std::optional<double> emd;
    std::optional<double> mse;
    std::optional<double> rmse;
    std::optional<double> cos_sim;
    std::map<std::string, DiscMetrics> discriminators;  // kind name -> metrics
    bool timestamps_synthesized{false};

    nlohmann::json to_json() const {
        nlohmann::json j;
        auto put = [&](const char* k, const std::optional<double>& v) {
            if (v) j[k] = *v;
            else j[k] = nullptr;
        };
        put("jsd", jsd);
        put("emd", emd);
        put("mse", mse);
        put("rmse", rmse);
        put("cos_sim", cos_sim);
        j["timestamps_synthesized"] = timestamps_synthesized;
        j["discriminators"] = nlohmann::json::object();
        for (const auto& [k, m] : discriminators)
            j["discriminators"][k] = {{"accuracy", m.accuracy},
                                      {"macro_precision", m.macro_precision},
                                      {"macro_recall", m.macro_recall},
                                      {"macro_f1", m.macro_f1}};
        return j;
    }

    static std::string csv_header() {
        std::string h = "jsd,emd,mse,rmse,cos_sim";
        for (const char* k : {"tree", "logistic", "mlp"})
            for (const char* m : {"accuracy", "macro_precision", "macro_recall", "macro_f1"})
                h += "," + std::string(k) + "_" + m;
        return h;
    }

    std::string csv_row() const {
        std::ostringstream os;
        os.precision(17);
        auto put = [&](const std::optional<double>& v, bool first = false) {
            if (!first) os << ',';
            if (v) os << *v;
        };
        put(jsd, true);
        put(emd);
        put(mse);
        put(rmse);
        put(cos_sim);
        for (const char* k : {"tree", "logistic", "mlp"}) {
            auto it = discriminators.find(k);
            if (it == discriminators.end()) {
                os << ",,,,";
            } else {
                os << ',' << it->second.accuracy << ',' << it->second.macro_precision << ','
                   << it->second.macro_recall << ',' << it->second.macro_f1;
            }
        }
        return os.str();
    }
};

inline constexpr std::array<DiscKind, 3> kAllDiscKinds{DiscKind::Tree, DiscKind::Logistic,
                                                       DiscKind::Mlp};

namespace detail {

inline std::vector<FeatureVec> features_of(const std::vector<Trajectory>& trajs,
                                           bool* synthesized = nullptr) {
    // Features are always taken at a uniform polling cadence: generators emit
    // node sequences without real timing, so recorded timestamps would let a
    // discriminator separate corpora on cadence alone instead of shape.
    std::vector<FeatureVec> out;
    out.reserve(trajs.size());
    for (const auto& t : trajs) {
        if (t.effective_len < 3) continue;
        if (synthesized && t.t_ms.size() < t.effective_len) *synthesized = true;
        Trajectory u = t;
        u.t_ms.clear();
        attach_uniform_timestamps(u);
        out.push_back(extract_features(u));
    }
    return out;
}

inline std::vector<Point2> endpoints_cloud(const std::vector<Trajectory>& trajs) {
    // Point cloud of all effective nodes in the normalized task frame of each
    // trajectory (start -> origin, end -> (1, 0)). Normalizing removes the
    // shared task geometry so distribution metrics compare path shape.
    std::vector<Point2> pts;
    for (const auto& t : trajs) {
        const Point d = t.back_effective() - t.front();
        const double len = d.norm();
        if (!(len > 0.0)) continue;
        const double cx = d.x / len, cy = d.y / len;
        for (std::size_t i = 0; i < t.effective_len; ++i) {
            const Point p = t.points[i] - t.front();
            pts.push_back({(cx * p.x + cy * p.y) / len, (-cy * p.x + cx * p.y) / len});
        }
    }
    return pts;
}

inline void fill_distribution_metrics(EvalReport& rep, const std::vector<Trajectory>& human,
                                      const std::vector<Trajectory>& model) {
    const auto hp = endpoints_cloud(human);
    const auto mp = endpoints_cloud(model);
    rep.jsd = dmtg::jsd(hp, mp);
    rep.emd = dmtg::emd(hp, mp);
    try {
        rep.cos_sim = dmtg::cos_sim(mean_features(human), mean_features(model));
    } catch (const std::invalid_argument&) {
        rep.cos_sim.reset();
    }
    if (human.size() == model.size()) {
        // pairwise MSE needs a shared node count; resample both sides
        const std::size_t common_m = 32;
        std::vector<Trajectory> ha, mb;
        ha.reserve(human.size());
        mb.reserve(model.size());
        for (const auto& t : human) ha.push_back(resample(t, common_m));
        for (const auto& t : model) mb.push_back(resample(t, common_m));
        const auto [mse, rmse] = mse_rmse(ha, mb);
        rep.mse = mse;
        rep.rmse = rmse;
    }
}

}  // namespace detail

/// Independent protocol: split each side into 10 groups, train each
/// discriminator on 7 human + 7 model groups, test on the remaining 3+3;
/// distribution metrics computed on the full corpora.
inline EvalReport protocol_independent(const std::vector<Trajectory>& human,
                                       const std::vector<Trajectory>& model,
                                       std::uint64_t seed = 1) {
    bool synth = false;
    const auto hf = detail::features_of(human, &synth);
    const auto mf = detail::features_of(model, &synth);
    if (hf.size() < 10 || mf.size() < 10)
        throw std::invalid_argument("protocol_independent: need >= 10 usable samples per side");

    EvalReport rep;
    rep.timestamps_synthesized = synth;
    detail::fill_distribution_metrics(rep, human, model);

    Rng rng(seed);
    auto group_split = [&](std::size_t n) {
        // shuffle, deal into 10 groups, first 7 groups -> train
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng.index(i)]);
        std::vector<std::size_t> train, test;
        for (std::size_t i = 0; i < n; ++i) (i % 10 < 7 ? train : test).push_back(idx[i]);
        return std::pair{train, test};
    };
    const auto [htr, hte] = group_split(hf.size());
    const auto [mtr, mte] = group_split(mf.size());

    for (DiscKind kind : kAllDiscKinds) {
        std::vector<FeatureVec> xtr, xte;
        std::vector<int> ytr, yte;
        for (auto i : htr) { xtr.push_back(hf[i]); ytr.push_back(1); }
        for (auto i : mtr) { xtr.push_back(mf[i]); ytr.push_back(0); }
        for (auto i : hte) { xte.push_back(hf[i]); yte.push_back(1); }
        for (auto i : mte) { xte.push_back(mf[i]); yte.push_back(0); }
        auto disc = make_discriminator(kind);
        Rng fit_rng(Rng::derive(seed, 200 + static_cast<std::uint64_t>(kind)));
        disc->fit(xtr, ytr, fit_rng);
        std::vector<int> pred;
        pred.reserve(xte.size());
        for (const auto& f : xte) pred.push_back(disc->predict(f));
        rep.discriminators[disc_kind_name(kind)] = metrics_from_labels(yte, pred);
    }
    return rep;
}

/// Unified protocol: pool human samples against the union of all model
/// corpora (each model equally represented), train one discriminator per kind
/// on a stratified 7:3 split, and report per-model held-out metrics.
inline std::map<std::string, EvalReport> protocol_unified(
    const std::vector<Trajectory>& human,
    const std::map<std::string, std::vector<Trajectory>>& models, std::uint64_t seed = 1) {
    if (models.empty()) throw std::invalid_argument("protocol_unified: no model corpora");
    bool synth = false;
    const auto hf = detail::features_of(human, &synth);
    if (hf.size() < 10) throw std::invalid_argument("protocol_unified: human corpus too small");

    std::map<std::string, std::vector<FeatureVec>> mf;
    std::size_t min_model = SIZE_MAX;
    for (const auto& [name, corpus] : models) {
        auto f = detail::features_of(corpus, &synth);
        if (f.empty()) throw std::invalid_argument("protocol_unified: empty corpus " + name);
        min_model = std::min(min_model, f.size());
        mf[name] = std::move(f);
    }

    Rng rng(seed);
    auto shuffled = [&](std::size_t n) {
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng.index(i)]);
        return idx;
    };

    // equal share per model; truncate each corpus to the smallest size
    std::vector<FeatureVec> xtr, xte;
    std::vector<int> ytr, yte;
    std::map<std::string, std::vector<std::size_t>> test_of;  // model -> indices into xte
    const auto hi = shuffled(hf.size());
    const std::size_t htr_n = hf.size() * 7 / 10;
    for (std::size_t i = 0; i < hf.size(); ++i) {
        (i < htr_n ? xtr : xte).push_back(hf[hi[i]]);
        (i < htr_n ? ytr : yte).push_back(1);
    }
    for (auto& [name, feats] : mf) {
        const auto idx = shuffled(feats.size());
        const std::size_t use = min_model;
        const std::size_t tr_n = use * 7 / 10;
        for (std::size_t i = 0; i < use; ++i) {
            if (i < tr_n) {
                xtr.push_back(feats[idx[i]]);
                ytr.push_back(0);
            } else {
                test_of[name].push_back(xte.size());
                xte.push_back(feats[idx[i]]);
                yte.push_back(0);
            }
        }
    }

    std::vector<std::size_t> human_test;
    for (std::size_t i = 0; i < yte.size(); ++i)
        if (yte[i] == 1) human_test.push_back(i);

    std::map<std::string, EvalReport> out;
    for (const auto& [name, corpus] : models) {
        EvalReport rep;
        rep.timestamps_synthesized = synth;
        detail::fill_distribution_metrics(rep, human, corpus);
        out[name] = std::move(rep);
    }

    for (DiscKind kind : kAllDiscKinds) {
        auto disc = make_discriminator(kind);
        Rng fit_rng(Rng::derive(seed, 300 + static_cast<std::uint64_t>(kind)));
        disc->fit(xtr, ytr, fit_rng);
        std::vector<int> pred;
        pred.reserve(xte.size());
        for (const auto& f : xte) pred.push_back(disc->predict(f));
        for (const auto& [name, idxs] : test_of) {
            // per-model metrics: this model's test slice vs the human test slice
            std::vector<int> yt, yp;
            for (auto i : idxs) { yt.push_back(0); yp.push_back(pred[i]); }
            for (auto i : human_test) { yt.push_back(1); yp.push_back(pred[i]); }
            out[name].discriminators[disc_kind_name(kind)] = metrics_from_labels(yt, yp);
        }
    }
    return out;
}

}  // namespace dmtg
