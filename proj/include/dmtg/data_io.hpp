#pragma once

// Dataset ingestion (SapiMouse-style CSV, traces-style JSON), canonical JSONL
// persistence, and a synthetic human oracle used as desk-scale ground truth.

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dmtg/core.hpp"
#include "dmtg/generators.hpp"
#include "dmtg/rng.hpp"

#include <json.hpp>

namespace dmtg {

struct RawEvent {
    double t_ms{0.0};
    enum class Kind { Move, Press, Release } kind{Kind::Move};
    double x{0.0}, y{0.0};
};

using Session = std::vector<RawEvent>;

struct CsvLoadResult {
    std::vector<Session> sessions;
    std::size_t skipped{0};
};

/// SapiMouse-style CSV: columns timestamp, button, state, x, y. Header
/// optional. One file = one session. Malformed rows are skipped and counted;
/// more than 10% malformed is an error.
inline CsvLoadResult load_sapimouse_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_sapimouse_csv: cannot open " + path);
    Session session;
    std::size_t skipped = 0, rows = 0;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string f_t, f_button, f_state, f_x, f_y;
        if (!std::getline(ss, f_t, ',') || !std::getline(ss, f_button, ',') ||
            !std::getline(ss, f_state, ',') || !std::getline(ss, f_x, ',') ||
            !std::getline(ss, f_y)) {
            if (first && line.find("time") != std::string::npos) { first = false; continue; }
            ++rows; ++skipped; first = false;
            continue;
        }
        const bool was_first = first;
        first = false;
        if (was_first) {
            // header row: the timestamp field is non-numeric
            char* end = nullptr;
            (void)std::strtod(f_t.c_str(), &end);
            if (end == f_t.c_str()) continue;
        }
        ++rows;
        try {
            RawEvent ev;
            ev.t_ms = std::stod(f_t);
            ev.x = std::stod(f_x);
            ev.y = std::stod(f_y);
            if (f_state == "Pressed" || f_state == "press" || f_state == "Drag")
                ev.kind = f_state == "Drag" ? RawEvent::Kind::Move : RawEvent::Kind::Press;
            else if (f_state == "Released" || f_state == "release")
                ev.kind = RawEvent::Kind::Release;
            else
                ev.kind = RawEvent::Kind::Move;
            if (!session.empty() && ev.t_ms < session.back().t_ms)
                throw std::runtime_error("time went backwards");
            session.push_back(ev);
        } catch (const std::exception&) {
            ++skipped;
        }
    }
    if (rows == 0) throw std::runtime_error("load_sapimouse_csv: empty file " + path);
    if (skipped * 10 > rows)
        throw std::runtime_error("load_sapimouse_csv: >10% malformed rows in " + path);
    CsvLoadResult out;
    out.sessions.push_back(std::move(session));
    out.skipped = skipped;
    return out;
}

struct TracesLoadResult {
    std::vector<Trajectory> corpus;
    std::size_t skipped{0};
};

/// Traces-style JSON: an array of traces, each an array of [x, y] pairs.
/// Timestamps are absent by design; empty traces are skipped with a count.
inline TracesLoadResult load_traces_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_traces_json: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("load_traces_json: parse error in " + path + ": " + e.what());
    }
    if (!j.is_array()) throw std::runtime_error("load_traces_json: $ is not an array");
    TracesLoadResult out;
    for (std::size_t ti = 0; ti < j.size(); ++ti) {
        const auto& trace = j[ti];
        if (!trace.is_array())
            throw std::runtime_error("load_traces_json: $[" + std::to_string(ti) +
                                     "] is not an array");
        if (trace.empty()) { ++out.skipped; continue; }
        Trajectory traj;
        for (std::size_t pi = 0; pi < trace.size(); ++pi) {
            const auto& p = trace[pi];
            if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
                throw std::runtime_error("load_traces_json: $[" + std::to_string(ti) + "][" +
                                         std::to_string(pi) + "] is not an [x,y] pair");
            traj.points.push_back({p[0].get<double>(), p[1].get<double>()});
        }
        traj.effective_len = traj.points.size();
        out.corpus.push_back(std::move(traj));
    }
    return out;
}

struct SegmentResult {
    std::vector<Trajectory> corpus;
    std::size_t dropped{0};
};

/// Split sessions into trajectories at press/release boundaries and at
/// inter-event gaps larger than gap_ms; drop segments shorter than min_len.
inline SegmentResult segment_sessions(const std::vector<Session>& sessions,
                                      double gap_ms = 1000.0, std::size_t min_len = 8) {
    SegmentResult out;
    auto flush = [&](std::vector<RawEvent>& seg) {
        if (seg.size() >= min_len) {
            Trajectory traj;
            const double t0 = seg.front().t_ms;
            for (const auto& ev : seg) {
                if (!traj.t_ms.empty() && !(ev.t_ms - t0 > traj.t_ms.back())) continue;
                traj.points.push_back({ev.x, ev.y});
                traj.t_ms.push_back(ev.t_ms - t0);
            }
            traj.effective_len = traj.points.size();
            if (traj.effective_len >= min_len && !(traj.front() == traj.back_effective())) {
                out.corpus.push_back(std::move(traj));
                seg.clear();
                return;
            }
        }
        if (!seg.empty()) ++out.dropped;
        seg.clear();
    };
    for (const auto& session : sessions) {
        std::vector<RawEvent> seg;
        for (const auto& ev : session) {
            const bool gap = !seg.empty() && ev.t_ms - seg.back().t_ms > gap_ms;
            const bool boundary = ev.kind != RawEvent::Kind::Move;
            if (gap || boundary) flush(seg);
            if (ev.kind == RawEvent::Kind::Move) seg.push_back(ev);
        }
        flush(seg);
    }
    return out;
}

/// Synthetic human generator profile. Stands in for real datasets at desk
/// scale; the injected asymmetries are the ground truth the diagnostics
/// are expected to recover.
struct OracleProfile {
    double jerk_noise{0.015};     // lateral wander scale, fraction of distance
    double force_ratio{1.0};      // >1: stronger push when moving up (smaller y)
    double overshoot_prob{0.15};
    double poll_ms{8.0};
    std::size_t max_nodes{96};

    void validate() const {
        if (!(force_ratio > 0.0)) throw std::invalid_argument("OracleProfile: force_ratio <= 0");
        if (!(poll_ms >= 1.0)) throw std::invalid_argument("OracleProfile: poll_ms < 1");
    }
};

/// Minimum-jerk backbone + smooth lateral wander + signal-dependent jitter +
/// optional overshoot-and-correct. Upward movements (toward smaller y) run
/// at shortened duration so accelerations scale by force_ratio.
inline Trajectory synth_human(const TaskSpec& task, const OracleProfile& profile,
                              std::uint64_t seed) {
    task.validate();
    profile.validate();
    Rng rng(seed);
    const Point d = task.delta();
    const double dist_total = d.norm();
    double duration = fitts_duration_ms(dist_total);
    const bool upward = task.end.y < task.start.y;
    if (upward) duration /= std::sqrt(profile.force_ratio);

    const auto n_nodes = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(duration / profile.poll_ms)) + 1, 9,
        profile.max_nodes);
    const double dt = duration / static_cast<double>(n_nodes - 1);
    const Point perp{-d.y / dist_total, d.x / dist_total};

    const bool overshoot = rng.uniform() < profile.overshoot_prob;
    const double ov_amp = overshoot ? rng.uniform(0.02, 0.06) : 0.0;
    double amp[3];
    for (int k = 0; k < 3; ++k)
        amp[k] = rng.gaussian(0.0, profile.jerk_noise * dist_total / static_cast<double>(k + 1));

    Trajectory out;
    out.effective_len = n_nodes;
    out.points.resize(n_nodes);
    out.t_ms.resize(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        const double tau = static_cast<double>(i) / static_cast<double>(n_nodes - 1);
        double s = min_jerk(tau);
        if (ov_amp > 0.0) {
            // overshoot bump peaking near tau = 0.75, zero at both ends
            const double g = tau * tau * tau * (1.0 - tau) / 0.105469;
            s += ov_amp * g;
        }
        double lateral = 0.0;
        for (int k = 0; k < 3; ++k) lateral += amp[k] * std::sin((k + 1) * M_PI * tau);
        // signal-dependent jitter, scaled by the bell-shaped speed profile
        const double vel_frac = 30.0 * tau * tau * (1.0 - tau) * (1.0 - tau) / 1.875;
        const double jit = 0.1 * profile.jerk_noise * dist_total * vel_frac;
        const Point noise{rng.gaussian(0.0, jit), rng.gaussian(0.0, jit)};
        const Point raw = task.start + s * d + lateral * perp + noise;
        // recorded cursor positions sit on the integer pixel grid
        out.points[i] = {std::round(raw.x), std::round(raw.y)};
        out.t_ms[i] = dt * static_cast<double>(i);
    }
    out.points[0] = task.start;
    out.points[n_nodes - 1] = task.end;
    return out;
}

// ---- canonical JSONL persistence -------------------------------------------

struct TrajRecord {
    std::string id;
    Trajectory traj;
    std::string source;
    double alpha_bar{0.0};  // task complexity target; 0 = unknown/measured
};

inline nlohmann::json record_to_json(const TrajRecord& rec) {
    const Trajectory& t = rec.traj;
    nlohmann::json j;
    j["id"] = rec.id;
    j["task"] = {{"start", {t.front().x, t.front().y}},
                 {"end", {t.back_effective().x, t.back_effective().y}},
                 {"m", t.effective_len - 1},
                 {"alpha_bar", rec.alpha_bar}};
    nlohmann::json pts = nlohmann::json::array();
    for (std::size_t i = 0; i < t.effective_len; ++i)
        pts.push_back({t.points[i].x, t.points[i].y});
    j["points"] = pts;
    if (t.has_timestamps()) j["t_ms"] = t.t_ms;
    j["source"] = rec.source;
    return j;
}

inline TrajRecord record_from_json(const nlohmann::json& j) {
    TrajRecord rec;
    rec.id = j.at("id").get<std::string>();
    rec.source = j.value("source", "");
    rec.alpha_bar = j.at("task").value("alpha_bar", 0.0);
    for (const auto& p : j.at("points"))
        rec.traj.points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    rec.traj.effective_len = rec.traj.points.size();
    if (j.contains("t_ms")) rec.traj.t_ms = j.at("t_ms").get<std::vector<double>>();
    return rec;
}

inline void write_jsonl(const std::vector<TrajRecord>& corpus, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_jsonl: cannot open " + path);
    out << nlohmann::json{{"schema", "traj-v1"}}.dump() << "\n";
    for (const auto& rec : corpus) out << record_to_json(rec).dump() << "\n";
    if (!out) throw std::runtime_error("write_jsonl: write failed for " + path);
}

inline std::vector<TrajRecord> read_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_jsonl: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) return {};
    const auto header = nlohmann::json::parse(line);
    if (header.value("schema", "") != "traj-v1")
        throw std::runtime_error("read_jsonl: unknown schema in " + path);
    std::vector<TrajRecord> corpus;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        corpus.push_back(record_from_json(nlohmann::json::parse(line)));
    }
    return corpus;
}

inline std::vector<Trajectory> trajectories_of(const std::vector<TrajRecord>& corpus) {
    std::vector<Trajectory> out;
    out.reserve(corpus.size());
    for (const auto& r : corpus) out.push_back(r.traj);
    return out;
}

}  // namespace dmtg
