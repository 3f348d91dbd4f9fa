#include "trgc/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace trgc {

std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& tok, const std::string& where) {
    double v = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last)
        throw Error("schema", "cannot parse number '" + tok + "' in " + where);
    return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string tok;
    std::istringstream ss(line);
    while (std::getline(ss, tok, sep)) out.push_back(tok);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

Matrix matrix_from_json(const Json& j, int rows, int cols, const std::string& name) {
    if (!j.is_array() || static_cast<int>(j.size()) != rows)
        throw Error("schema", name + " must be a " + std::to_string(rows) + "-row matrix");
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        const Json& row = j[i];
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            throw Error("schema", name + " row " + std::to_string(i) + " must have " +
                                      std::to_string(cols) + " entries");
        for (int k = 0; k < cols; ++k) {
            if (!row[k].is_number())
                throw Error("schema", name + " contains a non-numeric entry");
            m(i, k) = row[k].get<double>();
        }
    }
    return m;
}

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (long i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (long j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

std::pair<int, int> read_header_pd(const Json& j, const char* what) {
    if (!j.contains("p") || !j["p"].is_number_integer())
        throw Error("schema", std::string(what) + " JSON needs an integer field 'p'");
    if (!j.contains("d") || !j["d"].is_number_integer())
        throw Error("schema", std::string(what) + " JSON needs an integer field 'd'");
    const int p = j["p"].get<int>();
    const int d = j["d"].get<int>();
    if (p < 1 || d < 1) throw Error("schema", std::string(what) + " has invalid p or d");
    return {p, d};
}

std::vector<Matrix> lag_matrices_from_json(const Json& j, int p, int d,
                                           const std::string& name) {
    if (!j.is_array() || static_cast<int>(j.size()) != p)
        throw Error("schema", name + " must hold " + std::to_string(p) + " matrices");
    std::vector<Matrix> out(p);
    for (int h = 0; h < p; ++h)
        out[h] = matrix_from_json(j[h], d, d, name + "[" + std::to_string(h) + "]");
    return out;
}

}  // namespace

void write_csv(const TimeSeries& series, const std::string& path) {
    series.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io", "cannot open '" + path + "' for writing");
    if (series.seed) out << "# seed=" << *series.seed << "\n";
    static const char* names[] = {"x", "y", "g"};
    const int d = series.dim();
    if (d > 3) throw Error("invalid-argument", "CSV serialization supports up to 3 channels");
    out << "t";
    for (int c = 0; c < d; ++c) out << "," << names[c];
    out << "\n";
    for (long t = 0; t < series.length(); ++t) {
        out << t;
        for (int c = 0; c < d; ++c) out << "," << format_double(series.values(t, c));
        out << "\n";
    }
    if (!out) throw Error("io", "failed writing '" + path + "'");
}

TimeSeries read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io", "cannot open '" + path + "'");
    std::string line;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto pos = line.find("seed=");
            if (pos != std::string::npos) seed = std::stoull(line.substr(pos + 5));
            continue;
        }
        header = split(line, ',');
        break;
    }
    if (header.size() < 2 || header[0] != "t")
        throw Error("schema", "CSV header must start with column 't'");
    const int d = static_cast<int>(header.size()) - 1;
    if (d > 3) throw Error("schema", "CSV has more than 3 data columns");

    std::vector<std::array<double, 3>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const std::vector<std::string> toks = split(line, ',');
        if (static_cast<int>(toks.size()) != d + 1)
            throw Error("schema", "CSV row with " + std::to_string(toks.size()) +
                                      " fields, expected " + std::to_string(d + 1));
        std::array<double, 3> row{};
        for (int c = 0; c < d; ++c)
            row[c] = parse_double(toks[c + 1], "column '" + header[c + 1] + "'");
        rows.push_back(row);
    }
    if (rows.empty()) throw Error("schema", "CSV contains no samples");

    TimeSeries series;
    series.seed = seed;
    series.values.resize(static_cast<long>(rows.size()), d);
    for (long t = 0; t < series.length(); ++t)
        for (int c = 0; c < d; ++c) series.values(t, c) = rows[t][c];
    series.validate();
    return series;
}

Json model_to_json(const VarModel& model) {
    Json j;
    j["p"] = model.p;
    j["d"] = model.d;
    Json a = Json::array();
    for (const Matrix& m : model.coeffs) a.push_back(matrix_to_json(m));
    j["A"] = a;
    j["Sigma"] = matrix_to_json(model.resid_cov);
    return j;
}

VarModel model_from_json(const Json& j) {
    const auto [p, d] = read_header_pd(j, "model");
    if (!j.contains("A")) throw Error("schema", "model JSON needs field 'A'");
    if (!j.contains("Sigma")) throw Error("schema", "model JSON needs field 'Sigma'");
    VarModel model;
    model.p = p;
    model.d = d;
    model.coeffs = lag_matrices_from_json(j["A"], p, d, "A");
    model.resid_cov = matrix_from_json(j["Sigma"], d, d, "Sigma");
    model.validate();
    return model;
}

Json svar_to_json(const SvarModel& svar) {
    Json j;
    j["p"] = svar.p;
    j["d"] = svar.d;
    j["Gamma0"] = matrix_to_json(svar.gamma0);
    Json g = Json::array();
    for (const Matrix& m : svar.gammas) g.push_back(matrix_to_json(m));
    j["Gamma"] = g;
    j["Sigma"] = matrix_to_json(svar.resid_cov);
    return j;
}

SvarModel svar_from_json(const Json& j) {
    const auto [p, d] = read_header_pd(j, "SVAR");
    for (const char* field : {"Gamma0", "Gamma", "Sigma"})
        if (!j.contains(field))
            throw Error("schema", std::string("SVAR JSON needs field '") + field + "'");
    SvarModel svar;
    svar.p = p;
    svar.d = d;
    svar.gamma0 = matrix_from_json(j["Gamma0"], d, d, "Gamma0");
    svar.gammas = lag_matrices_from_json(j["Gamma"], p, d, "Gamma");
    svar.resid_cov = matrix_from_json(j["Sigma"], d, d, "Sigma");
    svar.validate();
    return svar;
}

Json mixture_to_json(const MixtureModel& mix) {
    Json j;
    j["p"] = mix.latent.p;
    j["d"] = mix.latent.d;
    j["M"] = matrix_to_json(mix.mixing);
    Json b = Json::array();
    for (const Matrix& m : mix.latent.coeffs) b.push_back(matrix_to_json(m));
    j["B"] = b;
    j["Sigma"] = matrix_to_json(mix.latent.resid_cov);
    return j;
}

MixtureModel mixture_from_json(const Json& j) {
    const auto [p, d] = read_header_pd(j, "mixture");
    for (const char* field : {"M", "B", "Sigma"})
        if (!j.contains(field))
            throw Error("schema", std::string("mixture JSON needs field '") + field + "'");
    MixtureModel mix;
    mix.mixing = matrix_from_json(j["M"], d, d, "M");
    mix.latent.p = p;
    mix.latent.d = d;
    mix.latent.coeffs = lag_matrices_from_json(j["B"], p, d, "B");
    mix.latent.resid_cov = matrix_from_json(j["Sigma"], d, d, "Sigma");
    mix.validate();
    return mix;
}

void write_json_file(const Json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io", "cannot open '" + path + "' for writing");
    out << j.dump(2) << "\n";
    if (!out) throw Error("io", "failed writing '" + path + "'");
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io", "cannot open '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw Error("schema", "invalid JSON in '" + path + "': " + e.what());
    }
    return j;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io", "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& text, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io", "cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw Error("io", "failed writing '" + path + "'");
}

}  // namespace trgc
