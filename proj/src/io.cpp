#include "qcd/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qcd::io {

namespace {

linalg::Mat mat_from_rows(const nlohmann::json& rows) {
    if (!rows.is_array() || rows.empty())
        throw std::invalid_argument("config: \"rows\" must be a non-empty array");
    const std::size_t n = rows.size();
    linalg::Mat m(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!rows[i].is_array() || rows[i].size() != n)
            throw std::invalid_argument("config: \"rows\" must be square");
        for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i][j].get<double>();
    }
    return m;
}

}  // namespace

nlohmann::json kernel_to_json(const markov::TransitionKernel& k) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < k.n_states(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t j = 0; j < k.n_states(); ++j) row.push_back(k.rows(i, j));
        rows.push_back(std::move(row));
    }
    return {{"states", k.state_values}, {"rows", std::move(rows)}};
}

markov::TransitionKernel kernel_from_json(const nlohmann::json& j) {
    linalg::Mat rows = mat_from_rows(j.at("rows"));
    std::vector<double> states;
    if (j.contains("states")) states = j.at("states").get<std::vector<double>>();
    return markov::TransitionKernel::make(std::move(rows), std::move(states));
}

nlohmann::json spec_to_json(const kernel::KernelSpec& s) {
    return {{"family", std::string(kernel::family_name(s.family))},
            {"bandwidth", s.bandwidth}};
}

kernel::KernelSpec spec_from_json(const nlohmann::json& j) {
    kernel::KernelSpec s;
    if (j.contains("family"))
        s.family = kernel::family_from_name(j.at("family").get<std::string>());
    if (j.contains("bandwidth")) s.bandwidth = j.at("bandwidth").get<double>();
    s.validate();
    return s;
}

nlohmann::json detector_to_json(const detector::DetectorConfig& c) {
    return {{"m", c.m},
            {"sigma", c.sigma},
            {"threshold", c.threshold},
            {"kernel", spec_to_json(c.kernel)}};
}

detector::DetectorConfig detector_from_json(const nlohmann::json& j) {
    detector::DetectorConfig c;
    if (j.contains("m")) c.m = j.at("m").get<std::size_t>();
    if (j.contains("sigma")) c.sigma = j.at("sigma").get<double>();
    if (j.contains("threshold")) c.threshold = j.at("threshold").get<double>();
    if (j.contains("kernel")) c.kernel = spec_from_json(j.at("kernel"));
    c.validate();
    return c;
}

nlohmann::json experiment_to_json(const bench::ExperimentConfig& c) {
    nlohmann::json algs = nlohmann::json::array();
    for (auto a : c.algorithms) algs.push_back(bench::algorithm_name(a));
    nlohmann::json exp = {{"thresholds", c.thresholds},
                          {"sigmas", c.sigmas},
                          {"trials", c.trials},
                          {"max_samples", c.max_samples},
                          {"seed", c.seed},
                          {"algorithms", std::move(algs)},
                          {"threads", c.threads}};
    if (c.change_point)
        exp["change_point"] = *c.change_point;
    else
        exp["change_point"] = nullptr;
    return {{"schema", kSchemaVersion},
            {"kernel_p", kernel_to_json(c.kernel_p)},
            {"kernel_q", kernel_to_json(c.kernel_q)},
            {"detector", detector_to_json(c.detector)},
            {"experiment", std::move(exp)}};
}

bench::ExperimentConfig experiment_from_json(const nlohmann::json& j) {
    if (j.contains("schema") && j.at("schema").get<int>() != kSchemaVersion)
        throw std::invalid_argument("config: unsupported schema version");
    bench::ExperimentConfig c;
    c.kernel_p = kernel_from_json(j.at("kernel_p"));
    c.kernel_q = j.contains("kernel_q") ? kernel_from_json(j.at("kernel_q"))
                                        : c.kernel_p;
    if (j.contains("detector")) c.detector = detector_from_json(j.at("detector"));
    if (j.contains("experiment")) {
        const auto& e = j.at("experiment");
        if (e.contains("thresholds"))
            c.thresholds = e.at("thresholds").get<std::vector<double>>();
        if (e.contains("sigmas")) c.sigmas = e.at("sigmas").get<std::vector<double>>();
        if (e.contains("trials")) c.trials = e.at("trials").get<std::size_t>();
        if (e.contains("max_samples"))
            c.max_samples = e.at("max_samples").get<std::uint64_t>();
        if (e.contains("seed")) c.seed = e.at("seed").get<std::uint64_t>();
        if (e.contains("threads")) c.threads = e.at("threads").get<std::size_t>();
        if (e.contains("change_point")) {
            if (e.at("change_point").is_null())
                c.change_point = std::nullopt;
            else
                c.change_point = e.at("change_point").get<std::uint64_t>();
        }
        if (e.contains("algorithms")) {
            c.algorithms.clear();
            for (const auto& name : e.at("algorithms"))
                c.algorithms.push_back(
                    bench::algorithm_from_name(name.get<std::string>()));
        }
    }
    return c;
}

nlohmann::json bounds_report_to_json(const theory::BoundsReport& r) {
    nlohmann::json j = {
        {"m", r.m},
        {"sigma", r.sigma},
        {"threshold", r.threshold},
        {"bandwidth", r.bandwidth},
        {"cert_p", {{"R", r.cert_p.R}, {"lambda", r.cert_p.lambda}}},
        {"cert_q", {{"R", r.cert_q.R}, {"lambda", r.cert_q.lambda}}},
        {"pair_cert_p", {{"R", r.pair_cert_p.R}, {"lambda", r.pair_cert_p.lambda}}},
        {"pair_cert_q", {{"R", r.pair_cert_q.R}, {"lambda", r.pair_cert_q.lambda}}},
        {"d_pq", r.d_pq},
        {"a_p", r.a_p},
        {"a_q", r.a_q},
        {"appendix",
         {{"zeta", r.appendix.zeta},
          {"eta", r.appendix.eta},
          {"chi", r.appendix.chi},
          {"u", r.appendix.u},
          {"M", r.appendix.big_m},
          {"gamma", r.appendix.gamma}}},
        {"h", r.h},
        {"q", r.q},
        {"arl_lower", r.arl_lower},
        {"sigma_detectable", r.sigma_detectable},
        {"wadd_feasible", r.wadd_feasible},
        {"h_positive", r.h_positive},
        {"notes", r.notes},
    };
    if (r.wadd_feasible) {
        j["xi"] = r.xi;
        j["n_c"] = r.n_c;
        j["delta"] = r.delta;
        j["wadd_upper"] = r.wadd_upper.value();
    } else {
        j["wadd_upper"] = nullptr;
    }
    return j;
}

bench::ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config parse error in " + path.string() + ": " +
                                    e.what());
    }
    return experiment_from_json(j);
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

namespace {

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

}  // namespace

std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<Series>& series) {
    constexpr double width = 720, height = 480;
    constexpr double ml = 70, mr = 160, mt = 40, mb = 55;
    const double pw = width - ml - mr, ph = height - mt - mb;

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (auto [x, y] : s.points) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (xmin > xmax) { xmin = 0; xmax = 1; }
    if (ymin > ymax) { ymin = 0; ymax = 1; }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;

    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return mt + ph - (y - ymin) / (ymax - ymin) * ph; };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                   "#9467bd", "#8c564b"};
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"15\">"
      << title << "</text>\n";
    s << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\""
      << ph << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double fx = xmin + (xmax - xmin) * t / 4.0;
        const double fy = ymin + (ymax - ymin) * t / 4.0;
        s << "<line x1=\"" << px(fx) << "\" y1=\"" << mt + ph << "\" x2=\"" << px(fx)
          << "\" y2=\"" << mt + ph + 5 << "\" stroke=\"#444\"/>\n";
        s << "<text x=\"" << px(fx) << "\" y=\"" << mt + ph + 18
          << "\" text-anchor=\"middle\">" << fmt_tick(fx) << "</text>\n";
        s << "<line x1=\"" << ml - 5 << "\" y1=\"" << py(fy) << "\" x2=\"" << ml
          << "\" y2=\"" << py(fy) << "\" stroke=\"#444\"/>\n";
        s << "<text x=\"" << ml - 8 << "\" y=\"" << py(fy) + 4
          << "\" text-anchor=\"end\">" << fmt_tick(fy) << "</text>\n";
    }
    s << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
    s << "<text x=\"18\" y=\"" << mt + ph / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << mt + ph / 2 << ")\">"
      << y_label << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const char* color = colors[k % 6];
        s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
        for (auto [x, y] : series[k].points) s << px(x) << "," << py(y) << " ";
        s << "\"/>\n";
        for (auto [x, y] : series[k].points)
            s << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\""
              << color << "\"/>\n";
        const double ly = mt + 16 + 18 * static_cast<double>(k);
        s << "<line x1=\"" << ml + pw + 10 << "\" y1=\"" << ly << "\" x2=\""
          << ml + pw + 34 << "\" y2=\"" << ly << "\" stroke=\"" << color
          << "\" stroke-width=\"2\"/>\n";
        s << "<text x=\"" << ml + pw + 40 << "\" y=\"" << ly + 4 << "\">"
          << series[k].name << "</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

}  // namespace qcd::io
