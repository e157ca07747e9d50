#include "rowtsm/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace rowtsm {

EvalRecord pair_error(const CropRowDetection& det, const LineTruth& truth,
                      std::string image_id, std::string category) {
    EvalRecord rec;
    rec.image_id = std::move(image_id);
    rec.category = std::move(category);
    rec.dtheta_abs = std::abs(det.delta_theta_deg - truth.theta_deg);
    rec.dlx2_abs = std::abs(det.l_x2 - truth.l_x2);
    return rec;
}

EpsilonReport epsilon(std::span<const EvalRecord> records, double dtheta_max, double dlx2_max) {
    if (records.empty()) throw std::invalid_argument("epsilon undefined for empty record set");
    if (dtheta_max <= 0.0 || dlx2_max <= 0.0)
        throw std::invalid_argument("epsilon undefined for nonpositive maxima");

    double acc = 0.0, sum_t = 0.0, sum_l = 0.0;
    for (const EvalRecord& r : records) {
        acc += r.dtheta_abs / dtheta_max + r.dlx2_abs / dlx2_max;
        sum_t += r.dtheta_abs;
        sum_l += r.dlx2_abs;
    }
    const double n = static_cast<double>(records.size());

    EpsilonReport rep;
    rep.epsilon = 1.0 - acc / (2.0 * n);
    rep.n = static_cast<int>(records.size());
    rep.dtheta_max = dtheta_max;
    rep.dlx2_max = dlx2_max;
    rep.mean_dtheta = sum_t / n;
    rep.mean_dlx2 = sum_l / n;
    return rep;
}

std::vector<AppendixAResult> reproduce_appendix_a(std::span<const AppendixARow> fixture) {
    if (fixture.empty()) throw std::invalid_argument("empty fixture");
    std::vector<AppendixAResult> out;
    out.reserve(fixture.size());
    for (const AppendixARow& row : fixture) {
        const EvalRecord base{"", row.dtheta_b, row.dlx2_b, ""};
        const EvalRecord ours{"", row.dtheta, row.dlx2, ""};
        AppendixAResult res;
        res.cls = row.cls;
        res.eps_b_pct =
            100.0 * epsilon({&base, 1}, kAppendixDthetaMax, kAppendixDlx2Max).epsilon;
        res.eps_pct = 100.0 * epsilon({&ours, 1}, kAppendixDthetaMax, kAppendixDlx2Max).epsilon;
        out.push_back(res);
    }
    return out;
}

int settling_time(const TrialTrace& trace, double band_deg) {
    if (trace.frames.empty()) throw std::invalid_argument("settling_time needs a nonempty trace");
    for (const TrialFrame& f : trace.frames)
        if (std::abs(f.theta_world_deg) <= band_deg) return f.frame;
    return trace.max_frames + 1;
}

HyperparamSuggestion suggest_bc(std::span<const int> truth_lx2_values, int min_freq) {
    if (truth_lx2_values.empty()) throw std::invalid_argument("suggest_bc needs values");

    HyperparamSuggestion s;
    for (int v : truth_lx2_values) ++s.histogram[v];

    int lo = -1, hi = -1;
    for (const auto& [col, freq] : s.histogram) {
        if (freq < min_freq) continue;
        if (lo < 0) lo = col;
        hi = col;
    }
    if (lo < 0)
        throw std::invalid_argument("no column reaches the minimum frequency of " +
                                    std::to_string(min_freq));
    s.begin_b = lo;
    s.cease_c = hi;
    s.degenerate = lo == hi;
    return s;
}

double suggest_threshold(std::span<const double> peak_ratios) {
    if (peak_ratios.empty()) throw std::invalid_argument("suggest_threshold needs ratios");
    return *std::min_element(peak_ratios.begin(), peak_ratios.end());
}

std::string appendix_a_fixture_csv() {
    std::string out = "class,dtheta_b,dtheta,dlx2_b,dlx2,eps_b_reported,eps_reported\n";
    char line[128];
    for (const AppendixARow& r : appendix_a_table()) {
        std::snprintf(line, sizeof(line), "%d,%.2f,%.2f,%.2f,%.2f,%.2f,%.2f\n", r.cls,
                      r.dtheta_b, r.dtheta, r.dlx2_b, r.dlx2, r.eps_b_reported, r.eps_reported);
        out += line;
    }
    return out;
}

std::vector<AppendixARow> parse_appendix_a_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) ||
        line.rfind("class,dtheta_b,dtheta,dlx2_b,dlx2,eps_b_reported,eps_reported", 0) != 0)
        throw std::runtime_error("fixture csv: bad or missing header");

    std::vector<AppendixARow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        AppendixARow r;
        if (std::sscanf(line.c_str(), "%d,%lf,%lf,%lf,%lf,%lf,%lf", &r.cls, &r.dtheta_b,
                        &r.dtheta, &r.dlx2_b, &r.dlx2, &r.eps_b_reported,
                        &r.eps_reported) != 7)
            throw std::runtime_error("fixture csv: malformed row: " + line);
        rows.push_back(r);
    }
    if (rows.empty()) throw std::runtime_error("fixture csv: no data rows");
    return rows;
}

}  // namespace rowtsm
