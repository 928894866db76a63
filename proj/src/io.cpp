// Copyright 2026 The spinphase Authors
// SPDX-License-Identifier: Apache-2.0

#include "spinphase/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace spinphase {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) {
        throw IoError("error while reading '" + path.string() + "'");
    }
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
        throw IoError("error while writing '" + path.string() + "'");
    }
}

std::string format_double(double x) {
    if (x == 0.0) return "0";  // also folds -0
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return {buf.data(), res.ptr};
}

namespace {

json pair(Complex z) { return json::array({z.real(), z.imag()}); }

Complex parse_pair(const json& v) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        throw std::invalid_argument("matrix entries must be [re, im] number pairs");
    }
    return {v[0].get<double>(), v[1].get<double>()};
}

HalfInt parse_json_spin(const json& v) {
    if (v.is_string()) return parse_spin(v.get<std::string>());
    if (v.is_number_integer()) return parse_spin(std::to_string(v.get<long long>()));
    throw std::invalid_argument("\"J\" must be a string such as \"1/2\" or an integer");
}

}  // namespace

std::string state_to_json(const DensityMatrix& rho) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < rho.mat.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < rho.mat.cols(); ++j) row.push_back(pair(rho.mat(i, j)));
        rows.push_back(std::move(row));
    }
    json doc;
    doc["J"] = rho.J.to_string();
    doc["matrix"] = std::move(rows);
    return doc.dump() + "\n";
}

DensityMatrix state_from_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("state file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("J") || !doc.contains("matrix")) {
        throw std::invalid_argument("state file needs \"J\" and \"matrix\" fields");
    }
    const HalfInt J = parse_json_spin(doc["J"]);
    const int d = J.dim();
    const json& m = doc["matrix"];
    if (!m.is_array() || static_cast<int>(m.size()) != d) {
        throw std::invalid_argument("state matrix must have 2J+1 = " + std::to_string(d) + " rows");
    }
    Matrix mat(d, d);
    for (int i = 0; i < d; ++i) {
        const json& row = m[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != d) {
            throw std::invalid_argument("state matrix row " + std::to_string(i) + " must have " +
                                        std::to_string(d) + " entries");
        }
        for (int j = 0; j < d; ++j) mat(i, j) = parse_pair(row[static_cast<std::size_t>(j)]);
    }
    return DensityMatrix::checked(J, std::move(mat));
}

std::string rates_csv(const DecayRateTable& table) {
    std::string out = "L,gamma_lindblad,gamma_povm\n";
    for (std::size_t L = 0; L < table.lindblad.size(); ++L) {
        out += std::to_string(L) + "," + format_double(table.lindblad[L]) + "," +
               format_double(table.povm[L]) + "\n";
    }
    return out;
}

std::string grid_csv(const QuasiDist& F) {
    std::string out = "theta,phi,value\n";
    for (std::size_t i = 0; i < F.values.size(); ++i) {
        const PhasePoint& p = F.grid.points[i];
        out += format_double(p.theta) + "," + format_double(p.phi) + "," +
               format_double(F.values[i]) + "\n";
    }
    return out;
}

std::string spectral_json(const QuasiDist& F) {
    if (!F.spectral) {
        throw std::invalid_argument("quasidistribution carries no spectral coefficients");
    }
    json coeffs = json::array();
    const MomentVector& g = *F.spectral;
    for (int L = 0; L <= g.max_rank(); ++L) {
        for (int k = -L; k <= L; ++k) {
            const Complex c = g(L, k);
            coeffs.push_back({{"L", L}, {"k", k}, {"re", c.real()}, {"im", c.imag()}});
        }
    }
    json doc;
    doc["sigma"] = F.sigma;
    doc["t"] = F.time_label;
    doc["coeffs"] = std::move(coeffs);
    return doc.dump(1) + "\n";
}

std::string render_ppm(const QuasiDist& F) {
    const int nt = F.grid.n_theta;
    const int np = F.grid.n_phi;
    if (nt <= 0 || np <= 0 || F.values.size() != static_cast<std::size_t>(nt) * np) {
        throw std::invalid_argument("PPM rendering needs values on a structured grid");
    }
    double scale = 0.0;
    for (double v : F.values) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) scale = 1.0;
    std::string out = "P3\n# value 0 = white, +max = red, -max = blue, max = " +
                      format_double(scale) + "\n" + std::to_string(np) + " " +
                      std::to_string(nt) + "\n255\n";
    for (int i = 0; i < nt; ++i) {
        for (int j = 0; j < np; ++j) {
            const double x = std::clamp(F.values[static_cast<std::size_t>(i * np + j)] / scale, -1.0, 1.0);
            const int fade = static_cast<int>(std::lround(255.0 * (1.0 - std::abs(x))));
            const int r = x < 0.0 ? fade : 255;
            const int b = x > 0.0 ? fade : 255;
            out += std::to_string(r) + " " + std::to_string(fade) + " " + std::to_string(b);
            out += (j + 1 == np) ? "\n" : " ";
        }
    }
    return out;
}

std::string tensor_table_json(const TensorBasis& basis) {
    json arr = json::array();
    const std::string j = basis.spin().to_string();
    for (int L = 0; L <= basis.max_rank(); ++L) {
        for (int k = -L; k <= L; ++k) {
            const Matrix& T = basis.op(L, k);
            json flat = json::array();
            for (Eigen::Index r = 0; r < T.rows(); ++r) {
                for (Eigen::Index c = 0; c < T.cols(); ++c) flat.push_back(pair(T(r, c)));
            }
            arr.push_back({{"J", j}, {"L", L}, {"k", k}, {"matrix", std::move(flat)}});
        }
    }
    return arr.dump() + "\n";
}

}  // namespace spinphase
