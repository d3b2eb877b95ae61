// Batch front door: ingest raw logs, train the denoiser, sample trajectories,
// run the realism evaluation, and emit diagnostic tables as plot-ready CSV.
//
// Exit codes: 0 success, 1 assertion/acceptance failure, 2 usage/input error.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dmtg/classifiers.hpp"
#include "dmtg/core.hpp"
#include "dmtg/data_io.hpp"
#include "dmtg/diffusion.hpp"
#include "dmtg/features.hpp"
#include "dmtg/generators.hpp"
#include "dmtg/metrics.hpp"
#include "dmtg/unet.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void persist_config(const fs::path& out_dir, const std::string& verb, const json& resolved) {
    write_text(out_dir / (verb + "_config.json"), resolved.dump(2) + "\n");
}

dmtg::TaskSpec random_task(dmtg::Rng& rng, std::optional<double> alpha_bar, std::size_t m_min,
                           std::size_t m_max) {
    dmtg::TaskSpec task;
    do {
        task.start = {rng.uniform(100.0, task.screen_w - 100.0),
                      rng.uniform(100.0, task.screen_h - 100.0)};
        task.end = {rng.uniform(100.0, task.screen_w - 100.0),
                    rng.uniform(100.0, task.screen_h - 100.0)};
    } while ((task.end - task.start).norm() < 50.0);
    task.m = m_min + rng.index(m_max - m_min + 1);
    task.alpha_bar = alpha_bar ? *alpha_bar : rng.uniform(0.3, 0.8);
    return task;
}

void write_corpus_jsonl(const fs::path& path, const std::vector<dmtg::TrajRecord>& corpus,
                        const std::vector<double>* achieved = nullptr) {
    std::ostringstream os;
    os << json{{"schema", "traj-v1"}}.dump() << "\n";
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        json j = dmtg::record_to_json(corpus[i]);
        if (achieved) j["achieved_alpha_bar"] = (*achieved)[i];
        os << j.dump() << "\n";
    }
    write_text(path, os.str());
}

std::vector<dmtg::TrajRecord> synth_corpus(std::size_t n, const dmtg::OracleProfile& profile,
                                           std::uint64_t seed, std::size_t m_min,
                                           std::size_t m_max) {
    std::vector<dmtg::TrajRecord> corpus;
    corpus.reserve(n);
    dmtg::Rng task_rng(dmtg::Rng::derive(seed, 1));
    dmtg::OracleProfile p = profile;
    for (std::size_t i = 0; i < n; ++i) {
        const dmtg::TaskSpec task = random_task(task_rng, std::nullopt, m_min, m_max);
        dmtg::TrajRecord rec;
        rec.id = "oracle-" + std::to_string(i);
        rec.source = "oracle";
        // vary the wander scale so the corpus spans the complexity range the
        // sampler can later be asked to target
        p.jerk_noise = 0.04 * std::exp(task_rng.uniform(0.0, std::log(0.55 / 0.04)));
        rec.traj = dmtg::synth_human(task, p, dmtg::Rng::derive(seed, 1000 + i));
        rec.alpha_bar = dmtg::complexity_ratio(rec.traj);
        corpus.push_back(std::move(rec));
    }
    return corpus;
}

struct CheckpointBundle {
    dmtg::UNet net;
    dmtg::NoiseSchedule sched;
    double k_c{dmtg::kDefaultKc};
    dmtg::TimingModel timing{};
};

CheckpointBundle load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    json j;
    in >> j;
    CheckpointBundle b{dmtg::UNet::from_json(j), {}, dmtg::kDefaultKc};
    const auto& t = j.at("train");
    b.sched = dmtg::build_schedule(t.at("schedule").get<std::string>() == "linear"
                                       ? dmtg::ScheduleKind::Linear
                                       : dmtg::ScheduleKind::Cosine,
                                   t.at("t_steps").get<std::size_t>());
    b.k_c = t.at("k_c").get<double>();
    if (t.contains("timing")) {
        const auto& tm = t.at("timing");
        b.timing.a = tm.at("a").get<double>();
        b.timing.b = tm.at("b").get<double>();
        b.timing.c = tm.at("c").get<double>();
        b.timing.fitted = true;
    }
    return b;
}

// ---- ingest -----------------------------------------------------------------

int cmd_ingest(const std::vector<std::string>& csv_paths,
               const std::vector<std::string>& json_paths, const fs::path& out_dir,
               double gap_ms, std::size_t min_len) {
    fs::create_directories(out_dir);
    std::vector<dmtg::TrajRecord> corpus;
    json report;
    report["sources"] = json::array();
    for (const auto& path : csv_paths) {
        const auto loaded = dmtg::load_sapimouse_csv(path);
        const auto seg = dmtg::segment_sessions(loaded.sessions, gap_ms, min_len);
        for (std::size_t i = 0; i < seg.corpus.size(); ++i) {
            dmtg::TrajRecord rec;
            rec.id = fs::path(path).stem().string() + "-" + std::to_string(i);
            rec.source = path;
            rec.traj = seg.corpus[i];
            rec.alpha_bar = dmtg::complexity_ratio(rec.traj);
            corpus.push_back(std::move(rec));
        }
        report["sources"].push_back({{"path", path},
                                     {"format", "csv"},
                                     {"trajectories", seg.corpus.size()},
                                     {"rows_skipped", loaded.skipped},
                                     {"segments_dropped", seg.dropped}});
    }
    for (const auto& path : json_paths) {
        const auto loaded = dmtg::load_traces_json(path);
        for (std::size_t i = 0; i < loaded.corpus.size(); ++i) {
            dmtg::TrajRecord rec;
            rec.id = fs::path(path).stem().string() + "-" + std::to_string(i);
            rec.source = path;
            rec.traj = loaded.corpus[i];
            rec.alpha_bar = dmtg::complexity_ratio(rec.traj);
            corpus.push_back(std::move(rec));
        }
        report["sources"].push_back({{"path", path},
                                     {"format", "json"},
                                     {"trajectories", loaded.corpus.size()},
                                     {"traces_skipped", loaded.skipped}});
    }
    report["total_trajectories"] = corpus.size();
    write_corpus_jsonl(out_dir / "corpus.jsonl", corpus);
    write_text(out_dir / "ingest_report.json", report.dump(2) + "\n");
    std::cout << "ingested " << corpus.size() << " trajectories -> "
              << (out_dir / "corpus.jsonl").string() << "\n";
    return 0;
}

// ---- train ------------------------------------------------------------------

int cmd_train(const std::string& corpus_path, std::size_t synthetic_n,
              const fs::path& out_dir, std::uint64_t seed, dmtg::TrainConfig tc,
              dmtg::UNetConfig uc, const dmtg::OracleProfile& profile, json& resolved) {
    fs::create_directories(out_dir);
    std::vector<dmtg::Trajectory> dataset;
    if (!corpus_path.empty()) {
        dataset = dmtg::trajectories_of(dmtg::read_jsonl(corpus_path));
    } else if (synthetic_n > 0) {
        const std::size_t m_max = uc.n_buf - 2;
        for (auto& rec : synth_corpus(synthetic_n, profile, seed, 16, std::min<std::size_t>(63, m_max)))
            dataset.push_back(std::move(rec.traj));
    } else {
        std::cerr << "train: need --corpus or --synthetic\n";
        return 2;
    }

    tc.seed = seed;
    dmtg::UNet net(uc);
    net.init(seed);
    const dmtg::TrainReport report = dmtg::train(net, dataset, tc);

    json ckpt = net.to_json();
    ckpt["train"] = {{"schedule", tc.schedule == dmtg::ScheduleKind::Linear ? "linear" : "cosine"},
                     {"t_steps", tc.t_steps},
                     {"k_c", tc.k_c},
                     {"seed", seed}};
    if (report.timing.fitted)
        ckpt["train"]["timing"] = {
            {"a", report.timing.a}, {"b", report.timing.b}, {"c", report.timing.c}};
    write_text(out_dir / "checkpoint.json", ckpt.dump() + "\n");

    std::ostringstream csv;
    csv.precision(17);
    csv << "epoch,l_ddim,l_sim,l_style,total\n";
    for (std::size_t e = 0; e < report.total.size(); ++e)
        csv << e << ',' << report.l_ddim[e] << ',' << report.l_sim[e] << ',' << report.l_style[e]
            << ',' << report.total[e] << "\n";
    write_text(out_dir / "train_report.csv", csv.str());

    resolved["dataset_size"] = dataset.size();
    resolved["wall_seconds"] = report.wall_seconds;
    persist_config(out_dir, "train", resolved);
    std::cout << "trained on " << dataset.size() << " trajectories in " << report.wall_seconds
              << " s; final loss " << report.total.back() << "\n";
    return 0;
}

// ---- sample -----------------------------------------------------------------

int cmd_sample(const std::string& checkpoint, const std::string& baseline, std::size_t n,
               std::uint64_t seed, std::optional<double> alpha_bar, std::size_t n_steps,
               double tol, const fs::path& out_dir, json& resolved) {
    fs::create_directories(out_dir);
    std::optional<CheckpointBundle> bundle;
    if (baseline.empty()) {
        if (checkpoint.empty()) {
            std::cerr << "sample: need --checkpoint or --baseline\n";
            return 2;
        }
        bundle.emplace(load_checkpoint(checkpoint));
    }

    dmtg::Rng task_rng(dmtg::Rng::derive(seed, 2));
    std::vector<dmtg::TrajRecord> out;
    std::vector<double> achieved;
    const std::size_t m_max = bundle ? bundle->net.config().n_buf - 2 : 64;
    for (std::size_t i = 0; i < n; ++i) {
        dmtg::TaskSpec task = random_task(task_rng, alpha_bar, 16, std::min<std::size_t>(63, m_max));
        if (bundle) task.n_max = bundle->net.config().n_buf - 1;
        const std::uint64_t si = dmtg::Rng::derive(seed, 5000 + i);
        dmtg::TrajRecord rec;
        rec.id = "s" + std::to_string(i);
        rec.alpha_bar = task.alpha_bar;
        if (!baseline.empty()) {
            rec.source = baseline;
            if (baseline == "linear") rec.traj = dmtg::gen_linear(task);
            else if (baseline == "bezier") rec.traj = dmtg::gen_bezier(task, si);
            else if (baseline == "fitts") rec.traj = dmtg::gen_fitts(task, si);
            else {
                std::cerr << "sample: unknown baseline '" << baseline << "'\n";
                return 2;
            }
        } else {
            rec.source = "dmtg";
            dmtg::SampleConfig sc;
            sc.n_steps = n_steps;
            sc.tol = tol;
            sc.k_c = bundle->k_c;
            sc.timing = bundle->timing;
            rec.traj = dmtg::sample(task, si, bundle->net, bundle->sched, sc);
        }
        achieved.push_back(dmtg::complexity_ratio(rec.traj));
        out.push_back(std::move(rec));
    }
    write_corpus_jsonl(out_dir / "samples.jsonl", out, &achieved);
    persist_config(out_dir, "sample", resolved);
    double mean_err = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i)
        mean_err += std::abs(achieved[i] - out[i].alpha_bar);
    std::cout << "wrote " << out.size() << " samples; mean |achieved-target| complexity "
              << (out.empty() ? 0.0 : mean_err / static_cast<double>(out.size())) << "\n";
    return 0;
}

// ---- eval -------------------------------------------------------------------

void write_accel_hist(const fs::path& path, const std::vector<dmtg::Trajectory>& corpus) {
    const auto stats = dmtg::accel_direction_stats(corpus);
    std::ostringstream os;
    os.precision(17);
    os << "bin_lo,bin_hi,count_up,count_down\n";
    for (std::size_t b = 0; b + 1 < stats.bin_edges.size(); ++b)
        os << stats.bin_edges[b] << ',' << stats.bin_edges[b + 1] << ',' << stats.count_up[b]
           << ',' << stats.count_down[b] << "\n";
    write_text(path, os.str());
}

int cmd_eval(const std::string& human_path, const std::vector<std::string>& model_args,
             const std::string& protocol, bool use_tsne, std::uint64_t seed,
             const fs::path& out_dir, json& resolved) {
    fs::create_directories(out_dir);
    if (model_args.empty()) {
        std::cerr << "eval: need at least one --model name=path\n";
        return 2;
    }
    const auto human = dmtg::trajectories_of(dmtg::read_jsonl(human_path));
    std::map<std::string, std::vector<dmtg::Trajectory>> models;
    for (const auto& arg : model_args) {
        const auto eq = arg.find('=');
        if (eq == std::string::npos) {
            std::cerr << "eval: --model expects name=path, got '" << arg << "'\n";
            return 2;
        }
        models[arg.substr(0, eq)] =
            dmtg::trajectories_of(dmtg::read_jsonl(arg.substr(eq + 1)));
    }

    std::map<std::string, dmtg::EvalReport> reports;
    if (protocol == "unified") {
        reports = dmtg::protocol_unified(human, models, seed);
    } else if (protocol == "independent") {
        for (const auto& [name, corpus] : models)
            reports[name] = dmtg::protocol_independent(human, corpus, seed);
    } else {
        std::cerr << "eval: unknown protocol '" << protocol << "'\n";
        return 2;
    }

    json jrep;
    jrep["protocol"] = protocol;
    for (const auto& [name, rep] : reports) jrep["models"][name] = rep.to_json();
    write_text(out_dir / "report.json", jrep.dump(2) + "\n");

    std::ostringstream csv;
    csv << "model,protocol," << dmtg::EvalReport::csv_header() << "\n";
    for (const auto& [name, rep] : reports)
        csv << name << ',' << protocol << ',' << rep.csv_row() << "\n";
    write_text(out_dir / "report.csv", csv.str());

    // shared 2D embedding across all corpora
    std::vector<dmtg::Trajectory> pooled = human;
    std::vector<std::string> labels(human.size(), "human");
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < human.size(); ++i) ids.push_back("human-" + std::to_string(i));
    for (const auto& [name, corpus] : models)
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            pooled.push_back(corpus[i]);
            labels.push_back(name);
            ids.push_back(name + "-" + std::to_string(i));
        }
    const auto emb = dmtg::embed_2d(pooled, 32, use_tsne);
    std::ostringstream ecsv;
    ecsv.precision(17);
    ecsv << "id,x,y,label\n";
    for (std::size_t i = 0; i < emb.size(); ++i)
        ecsv << ids[i] << ',' << emb[i].x << ',' << emb[i].y << ',' << labels[i] << "\n";
    write_text(out_dir / "embedding.csv", ecsv.str());

    auto hist_for = [&](const std::string& name, const std::vector<dmtg::Trajectory>& corpus) {
        try {
            write_accel_hist(out_dir / ("accel_hist_" + name + ".csv"), corpus);
        } catch (const std::exception& e) {
            std::cerr << "note: accel histogram skipped for " << name << ": " << e.what() << "\n";
        }
    };
    hist_for("human", human);
    for (const auto& [name, corpus] : models) hist_for(name, corpus);

    persist_config(out_dir, "eval", resolved);
    for (const auto& [name, rep] : reports) {
        std::cout << name;
        if (rep.jsd) std::cout << ": jsd " << *rep.jsd;
        for (const auto& [k, m] : rep.discriminators)
            std::cout << ", " << k << " acc " << m.accuracy;
        std::cout << "\n";
    }
    return 0;
}

// ---- diag -------------------------------------------------------------------

int cmd_diag(const std::string& checkpoint, std::uint64_t seed, const fs::path& out_dir,
             json& resolved) {
    fs::create_directories(out_dir);
    dmtg::Rng rng(seed);

    // (a) entropy vs MST-length Monte-Carlo over the mixture-weight grid
    {
        dmtg::TaskSpec task;
        task.start = {0.0, 0.0};
        task.end = {600.0, 300.0};
        std::ostringstream os, fit;
        os.precision(17);
        fit.precision(17);
        os << "a,m,entropy,mean_mst,log_mean_mst\n";
        fit << "m,slope,r\n";
        for (std::size_t m : {16, 32, 64, 128}) {
            std::vector<double> xs, ys;
            for (int ai = 1; ai <= 20; ++ai) {
                const double a = 0.05 * ai;
                const dmtg::Cov2 cov = dmtg::mixture_cov(task, a);
                const double h = dmtg::gaussian_entropy(cov);
                double mean_mst = 0.0;
                const std::size_t reps = 200;
                for (std::size_t r = 0; r < reps; ++r) {
                    std::vector<dmtg::Point> pts(m);
                    for (auto& p : pts) p = rng.gaussian2(cov);
                    mean_mst += dmtg::mst_length(pts);
                }
                mean_mst /= static_cast<double>(reps);
                os << a << ',' << m << ',' << h << ',' << mean_mst << ','
                   << std::log(mean_mst) << "\n";
                xs.push_back(h);
                ys.push_back(std::log(mean_mst));
            }
            double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
            const double n = static_cast<double>(xs.size());
            for (std::size_t i = 0; i < xs.size(); ++i) {
                sx += xs[i]; sy += ys[i];
                sxx += xs[i] * xs[i]; sxy += xs[i] * ys[i]; syy += ys[i] * ys[i];
            }
            const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
            const double r = (n * sxy - sx * sy) /
                             std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
            fit << m << ',' << slope << ',' << r << "\n";
        }
        write_text(out_dir / "entropy_mst.csv", os.str());
        write_text(out_dir / "entropy_mst_fit.csv", fit.str());
    }

    // (b) complexity sweep and (c) parameter control need a model
    if (!checkpoint.empty()) {
        auto bundle = load_checkpoint(checkpoint);
        std::ostringstream sweep, ctl;
        sweep.precision(17);
        ctl.precision(17);
        sweep << "target,n,mean_achieved,mean_abs_err\n";
        ctl << "target,n,effective_length_errors,max_endpoint_err_normalized,mean_complexity_err\n";
        dmtg::Rng task_rng(dmtg::Rng::derive(seed, 3));
        for (int ti = 3; ti <= 8; ++ti) {
            const double target = 0.1 * ti;
            const std::size_t n = 100;
            double sum_achieved = 0.0, sum_err = 0.0, max_ep = 0.0;
            std::size_t len_errors = 0;
            for (std::size_t i = 0; i < n; ++i) {
                dmtg::TaskSpec task = random_task(task_rng, target, 16, 63);
                task.n_max = bundle.net.config().n_buf - 1;
                const auto traj = dmtg::sample(
                    task, dmtg::Rng::derive(seed, 9000 + ti * 1000 + i), bundle.net, bundle.sched);
                const double got = dmtg::complexity_ratio(traj);
                sum_achieved += got;
                sum_err += std::abs(got - target);
                if (traj.effective_len != task.m + 1) ++len_errors;
                const double d = (task.end - task.start).norm();
                max_ep = std::max({max_ep,
                                   (traj.points.front() - task.start).norm() / d,
                                   (traj.points[traj.effective_len - 1] - task.end).norm() / d});
            }
            sweep << target << ',' << n << ',' << sum_achieved / n << ',' << sum_err / n << "\n";
            ctl << target << ',' << n << ',' << len_errors << ',' << max_ep << ','
                << sum_err / n << "\n";
        }
        write_text(out_dir / "alpha_sweep.csv", sweep.str());
        write_text(out_dir / "param_control.csv", ctl.str());
    }

    persist_config(out_dir, "diag", resolved);
    std::cout << "diagnostics written to " << out_dir.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"entropy-controlled diffusion trajectory toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // allow the global options after the verb
    app.set_config("--config", "", "flat key=value config file; command line wins");

    std::uint64_t seed = 0;
    std::string out_dir = "out";
    app.add_option("--seed", seed, "global seed")->capture_default_str();
    app.add_option("--out-dir", out_dir, "output directory")->capture_default_str();

    // ingest
    auto* ing = app.add_subcommand("ingest", "convert raw logs to a canonical JSONL corpus");
    std::vector<std::string> csv_paths, json_paths;
    double gap_ms = 1000.0;
    std::size_t min_len = 8;
    ing->add_option("--csv", csv_paths, "event CSV files (timestamp,button,state,x,y)");
    ing->add_option("--json", json_paths, "trace JSON files (array of [x,y] arrays)");
    ing->add_option("--gap-ms", gap_ms, "session split gap")->capture_default_str();
    ing->add_option("--min-len", min_len, "minimum nodes per trajectory")->capture_default_str();

    // train
    auto* tr = app.add_subcommand("train", "train the denoiser");
    std::string corpus_path;
    std::size_t synthetic_n = 0;
    dmtg::TrainConfig tc;
    dmtg::UNetConfig uc;
    dmtg::OracleProfile profile;
    std::string schedule = "cosine";
    tr->add_option("--corpus", corpus_path, "training corpus JSONL");
    tr->add_option("--synthetic", synthetic_n, "generate N synthetic-oracle trajectories instead");
    tr->add_option("--epochs", tc.epochs)->capture_default_str();
    tr->add_option("--batch", tc.batch)->capture_default_str();
    tr->add_option("--lr", tc.lr)->capture_default_str();
    tr->add_option("--w1", tc.w1)->capture_default_str();
    tr->add_option("--w2", tc.w2)->capture_default_str();
    tr->add_option("--w3", tc.w3)->capture_default_str();
    tr->add_option("--t-steps", tc.t_steps)->capture_default_str();
    tr->add_option("--schedule", schedule, "linear|cosine")->capture_default_str();
    tr->add_option("--k-c", tc.k_c)->capture_default_str();
    tr->add_option("--base-ch", uc.base_ch)->capture_default_str();
    tr->add_option("--depth", uc.depth)->capture_default_str();
    tr->add_option("--force-ratio", profile.force_ratio, "oracle push/pull asymmetry")
        ->capture_default_str();

    // sample
    auto* sa = app.add_subcommand("sample", "generate trajectories");
    std::string checkpoint, baseline;
    std::size_t n_samples = 10, n_steps = 50;
    double tol = 0.02;
    double alpha_flag = -1.0;
    sa->add_option("--checkpoint", checkpoint, "checkpoint JSON");
    sa->add_option("--baseline", baseline, "linear|bezier|fitts (no checkpoint needed)");
    sa->add_option("--n", n_samples)->capture_default_str();
    sa->add_option("--alpha-bar", alpha_flag, "complexity target; default uniform 0.3-0.8");
    sa->add_option("--n-steps", n_steps)->capture_default_str();
    sa->add_option("--tol", tol, "complexity stop tolerance")->capture_default_str();

    // eval
    auto* ev = app.add_subcommand("eval", "realism evaluation of model corpora vs human");
    std::string human_path, protocol = "unified";
    std::vector<std::string> model_args;
    bool use_tsne = false;
    ev->add_option("--human", human_path, "human corpus JSONL")->required();
    ev->add_option("--model", model_args, "model corpus as name=path (repeatable)");
    ev->add_option("--protocol", protocol, "unified|independent")->capture_default_str();
    ev->add_flag("--tsne", use_tsne, "use seeded exact t-SNE instead of PCA");

    // diag
    auto* di = app.add_subcommand("diag", "diagnostic tables");
    std::string diag_checkpoint;
    di->add_option("--checkpoint", diag_checkpoint, "checkpoint for sweep/control tables");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const fs::path out(out_dir);
        json resolved;
        resolved["seed"] = seed;
        resolved["out_dir"] = out_dir;

        if (*ing) {
            resolved["csv"] = csv_paths;
            resolved["json"] = json_paths;
            resolved["gap_ms"] = gap_ms;
            resolved["min_len"] = min_len;
            fs::create_directories(out);
            persist_config(out, "ingest", resolved);
            return cmd_ingest(csv_paths, json_paths, out, gap_ms, min_len);
        }
        if (*tr) {
            tc.schedule = schedule == "linear" ? dmtg::ScheduleKind::Linear
                                               : dmtg::ScheduleKind::Cosine;
            resolved["corpus"] = corpus_path;
            resolved["synthetic"] = synthetic_n;
            resolved["epochs"] = tc.epochs;
            resolved["batch"] = tc.batch;
            resolved["lr"] = tc.lr;
            resolved["w1"] = tc.w1;
            resolved["w2"] = tc.w2;
            resolved["w3"] = tc.w3;
            resolved["t_steps"] = tc.t_steps;
            resolved["schedule"] = schedule;
            resolved["k_c"] = tc.k_c;
            resolved["base_ch"] = uc.base_ch;
            resolved["depth"] = uc.depth;
            resolved["force_ratio"] = profile.force_ratio;
            return cmd_train(corpus_path, synthetic_n, out, seed, tc, uc, profile, resolved);
        }
        if (*sa) {
            resolved["checkpoint"] = checkpoint;
            resolved["baseline"] = baseline;
            resolved["n"] = n_samples;
            resolved["alpha_bar"] = alpha_flag;
            resolved["n_steps"] = n_steps;
            resolved["tol"] = tol;
            std::optional<double> ab;
            if (alpha_flag > 0.0) ab = alpha_flag;
            return cmd_sample(checkpoint, baseline, n_samples, seed, ab, n_steps, tol, out,
                              resolved);
        }
        if (*ev) {
            resolved["human"] = human_path;
            resolved["model"] = model_args;
            resolved["protocol"] = protocol;
            resolved["tsne"] = use_tsne;
            return cmd_eval(human_path, model_args, protocol, use_tsne, seed, out, resolved);
        }
        if (*di) {
            resolved["checkpoint"] = diag_checkpoint;
            return cmd_diag(diag_checkpoint, seed, out, resolved);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
