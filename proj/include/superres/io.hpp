#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "detection.hpp"
#include "harness.hpp"
#include "model.hpp"
#include "pencil.hpp"
#include "recovery.hpp"

namespace superres::io {

using nlohmann::json;

/// Shortest text that parses back to the same double.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& text) {
    double x = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    while (first < last && (*first == ' ' || *first == '\t')) ++first;
    while (last > first && (last[-1] == ' ' || last[-1] == '\t' || last[-1] == '\r')) --last;
    if (first < last && *first == '+') ++first;
    const auto res = std::from_chars(first, last, x);
    if (res.ec != std::errc{} || res.ptr != last) throw std::invalid_argument("not a number: '" + text + "'");
    return x;
}

inline json vec_json(const Vec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

inline json amplitude_json(cplx a) { return json{{"re", a.real()}, {"im", a.imag()}}; }

// measure file: {"dimension": k, "sources": [{"y": [...], "re": x, "im": x}]}

inline json measure_json(const DiscreteMeasure& m) {
    json sources = json::array();
    for (std::size_t j = 0; j < m.size(); ++j)
        sources.push_back({{"y", vec_json(m.supports[j])}, {"re", m.amplitudes[j].real()}, {"im", m.amplitudes[j].imag()}});
    return json{{"dimension", m.dimension}, {"sources", sources}};
}

inline DiscreteMeasure measure_from_json(const json& j) {
    if (!j.is_object() || !j.contains("dimension") || !j.contains("sources"))
        throw std::invalid_argument("measure: expected an object with 'dimension' and 'sources'");
    DiscreteMeasure m;
    m.dimension = j.at("dimension").get<int>();
    for (const auto& s : j.at("sources")) {
        const auto& y = s.at("y");
        Vec v(static_cast<Eigen::Index>(y.size()));
        for (std::size_t i = 0; i < y.size(); ++i) v[static_cast<Eigen::Index>(i)] = y[i].get<double>();
        m.supports.push_back(v);
        m.amplitudes.emplace_back(s.at("re").get<double>(), s.value("im", 0.0));
    }
    m.validate();
    return m;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write '" + path + "'");
    out << text;
}

inline DiscreteMeasure load_measure(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw std::invalid_argument("measure file '" + path + "': " + e.what());
    }
    try {
        return measure_from_json(j);
    } catch (const json::exception& e) {
        throw std::invalid_argument("measure file '" + path + "': " + e.what());
    }
}

// samples file: header omega_1,...,omega_k,re,im

inline std::string samples_csv(const std::vector<Sample>& samples, int dimension) {
    std::string out;
    for (int i = 1; i <= dimension; ++i) out += "omega_" + std::to_string(i) + ",";
    out += "re,im\n";
    for (const auto& s : samples) {
        for (Eigen::Index i = 0; i < s.omega.size(); ++i) out += format_double(s.omega[i]) + ",";
        out += format_double(s.value.real()) + "," + format_double(s.value.imag()) + "\n";
    }
    return out;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

/// Parses a samples CSV; the dimension is the number of omega_* columns.
inline std::vector<Sample> parse_samples_csv(const std::string& text, int& dimension) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("samples: empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_csv_line(line);
    const int k = static_cast<int>(header.size()) - 2;
    if (k < 1 || header[header.size() - 2] != "re" || header.back() != "im")
        throw std::invalid_argument("samples: header must be omega_1,...,omega_k,re,im");
    for (int i = 0; i < k; ++i)
        if (header[static_cast<std::size_t>(i)] != "omega_" + std::to_string(i + 1))
            throw std::invalid_argument("samples: header must be omega_1,...,omega_k,re,im");
    dimension = k;

    std::vector<Sample> out;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (static_cast<int>(cells.size()) != k + 2)
            throw std::invalid_argument("samples: row " + std::to_string(row) + " has the wrong column count");
        Sample s{Vec(k), {}};
        for (int i = 0; i < k; ++i) s.omega[i] = parse_double(cells[static_cast<std::size_t>(i)]);
        s.value = {parse_double(cells[static_cast<std::size_t>(k)]), parse_double(cells[static_cast<std::size_t>(k + 1)])};
        out.push_back(std::move(s));
    }
    if (out.empty()) throw std::invalid_argument("samples: no rows");
    return out;
}

inline std::vector<Sample> load_samples(const std::string& path, int& dimension) {
    return parse_samples_csv(read_file(path), dimension);
}

// phase CSV

inline std::string phase_csv(const std::vector<TrialRecord>& records, bool include_timing = true) {
    std::string out = "mode,dim,n,log10_srf,log10_inv_sigma,seed,success,max_error,wall_ms\n";
    for (const auto& r : records) {
        out += std::string(to_string(r.spec.mode)) + "," + std::to_string(r.spec.dimension) + "," +
               std::to_string(r.spec.n) + "," + format_double(r.log_srf) + "," + format_double(r.log_inv_sigma) + "," +
               std::to_string(r.spec.seed) + "," + (r.success ? "1" : "0") + "," + format_double(r.max_error) + "," +
               (include_timing ? format_double(r.wall_ms) : std::string("0")) + "\n";
    }
    return out;
}

// results

inline json detection_json(const DetectionResult& r) {
    json per = json::array();
    for (const auto& d : r.per_direction) per.push_back({{"direction", vec_json(d.direction.vec())}, {"count", d.count}, {"singular_values", d.singular}});
    json out{{"count", r.count}, {"per_direction", per}};
    out["winner"] = r.winner ? json(*r.winner) : json(nullptr);
    return out;
}

inline json recovery_json(const RecoveryResult& r) {
    json locs = json::array(), amps = json::array();
    for (const auto& y : r.locations) locs.push_back(vec_json(y));
    for (const auto& a : r.amplitudes) amps.push_back(amplitude_json(a));
    return json{{"locations", locs}, {"amplitudes", amps}, {"residual", r.residual},
                {"v1", vec_json(r.v1.vec())}, {"v2", vec_json(r.v2.vec())}};
}

inline json pencil_json(const PencilResult& r) { return json(r.locations); }

inline json witness_json(const WitnessPair& w) {
    return json{{"mode", to_string(w.mode)}, {"mu", measure_json(w.mu)}, {"mu_hat", measure_json(w.mu_hat)},
                {"tau", w.tau}, {"sigma", w.sigma}, {"omega", w.cutoff}, {"sup", w.sup},
                {"valid", w.valid}, {"admissible", w.admissible}};
}

inline json bounds_json(const BoundReport& b) {
    return json{{"n", b.n}, {"dimension", b.dimension}, {"omega", b.cutoff}, {"sigma", b.sigma}, {"m_min", b.m_min},
                {"number_upper", b.number_upper}, {"number_lower", b.number_lower},
                {"support_upper", b.support_upper}, {"support_lower", b.support_lower},
                {"support_error_constant", b.support_error_constant}};
}

inline json boundary_json(const BoundaryFit& f) {
    json out{{"intercept", f.intercept}, {"b_srf", f.b_srf}, {"b_sigma", f.b_sigma}, {"converged", f.converged}};
    out["slope"] = std::isfinite(f.slope) ? json(f.slope) : json(nullptr);
    return out;
}

} // namespace superres::io
