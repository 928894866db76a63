// Copyright 2026 The spinphase Authors
// SPDX-License-Identifier: Apache-2.0

#include "spinphase/unravel.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>

#include <Eigen/Eigenvalues>

#include "spinphase/binomial.hpp"

namespace spinphase {

Rng trajectory_rng(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32)};
    return Rng(seq);
}

Eigen::Vector3d draw_noise(Rng& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    const double x = n(rng);
    const double y = n(rng);
    const double z = n(rng);
    return {x, y, z};
}

KickGenerator::KickGenerator(HalfInt J) : j_(J) {
    require_spin(J);
    const int d = J.dim();
    const int n = J.twice();
    coef_.assign(static_cast<std::size_t>(d) * d * d, 0.0);
    for (int p = 0; p <= n; ++p) {
        const int q = n - p;
        for (int pp = 0; pp <= n; ++pp) {
            const int qq = n - pp;
            const double log_norm = 0.5 * (std::lgamma(pp + 1.0) + std::lgamma(qq + 1.0) -
                                           std::lgamma(p + 1.0) - std::lgamma(q + 1.0));
            for (int i = std::max(0, pp - q); i <= std::min(p, pp); ++i) {
                coef_[(static_cast<std::size_t>(p) * d + pp) * d + i] =
                    std::exp(log_norm + log_binomial(p, i) + log_binomial(q, pp - i));
            }
        }
    }
}

Matrix KickGenerator::rotation(const Eigen::Vector3d& omega) const {
    const int d = j_.dim();
    const int n = j_.twice();
    const double alpha = omega.norm();
    if (alpha == 0.0) {
        return Matrix::Identity(d, d);
    }
    const Eigen::Vector3d u = omega / alpha;
    const double c = std::cos(0.5 * alpha);
    const double s = std::sin(0.5 * alpha);
    const Complex a(c, -u.z() * s);
    const Complex b = Complex(0.0, -s) * Complex(u.x(), -u.y());
    // Powers of the four entries of [[a, b], [-conj(b), conj(a)]].
    std::vector<Complex> pa(d), pnb(d), pb(d), pca(d);
    pa[0] = pnb[0] = pb[0] = pca[0] = 1.0;
    for (int i = 1; i <= n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        pa[k] = pa[k - 1] * a;
        pnb[k] = pnb[k - 1] * (-std::conj(b));
        pb[k] = pb[k - 1] * b;
        pca[k] = pca[k - 1] * std::conj(a);
    }
    Matrix D(d, d);
    // Column p = J+m (row 2J-p); entry at p' = J+m'.
    for (int p = 0; p <= n; ++p) {
        const int q = n - p;
        for (int pp = 0; pp <= n; ++pp) {
            Complex acc = 0.0;
            for (int i = std::max(0, pp - q); i <= std::min(p, pp); ++i) {
                const int j = pp - i;
                acc += coef_[(static_cast<std::size_t>(p) * d + pp) * d + i] *
                       pa[static_cast<std::size_t>(i)] * pnb[static_cast<std::size_t>(p - i)] *
                       pb[static_cast<std::size_t>(j)] * pca[static_cast<std::size_t>(q - j)];
            }
            D(n - pp, n - p) = acc;
        }
    }
    return D;
}

Matrix KickGenerator::unitary(const Eigen::Vector3d& xi, double gamma, double dt) const {
    return rotation(std::sqrt(gamma * dt) * xi);
}

Matrix kick_unitary(HalfInt J, const Eigen::Vector3d& xi, double gamma, double dt) {
    return KickGenerator(J).unitary(xi, gamma, dt);
}

Matrix kick_unitary_eigen(const SpinOperators& spin, const Eigen::Vector3d& xi, double gamma,
                          double dt) {
    const double s = std::sqrt(gamma * dt);
    const Matrix G = s * (xi.x() * spin.jx + xi.y() * spin.jy + xi.z() * spin.jz);
    Eigen::SelfAdjointEigenSolver<Matrix> es(G);
    const Eigen::VectorXd lam = es.eigenvalues();
    Vector phase(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i) phase(i) = std::polar(1.0, -lam(i));
    return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

Vector kick_step(const Vector& psi, HalfInt J, double gamma, double dt, Rng& rng) {
    return kick_unitary(J, draw_noise(rng), gamma, dt) * psi;
}

Matrix kick_step(const Matrix& rho, HalfInt J, double gamma, double dt, Rng& rng) {
    const Matrix U = kick_unitary(J, draw_noise(rng), gamma, dt);
    return U * rho * U.adjoint();
}

void KickConfig::validate() const {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
        throw std::invalid_argument("kick rate gamma must be non-negative and finite");
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("kick time step must be positive");
    }
    if (n_steps < 0) {
        throw std::invalid_argument("number of steps must be non-negative");
    }
    if (n_traj < 1) {
        throw std::invalid_argument("ensemble needs at least one trajectory");
    }
    if (keep_states < 0) {
        throw std::invalid_argument("keep_states must be non-negative");
    }
    for (int s : record_steps) {
        if (s < 0 || s > n_steps) {
            throw std::invalid_argument("record step " + std::to_string(s) + " outside [0, " +
                                        std::to_string(n_steps) + "]");
        }
    }
}

std::string step_size_warning(HalfInt J, const KickConfig& cfg) {
    const double two_j = J.twice();
    const double x = cfg.gamma * two_j * two_j * cfg.dt;
    if (x > 0.1) {
        return "gamma (2J)^2 dt = " + std::to_string(x) +
               " exceeds 0.1; the kick discretization bias may be visible";
    }
    return {};
}

unsigned worker_count() {
    unsigned n = std::max(1U, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SPINPHASE_THREADS")) {
        const std::string_view text(env);
        unsigned cap = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), cap);
        if (ec == std::errc() && ptr == text.data() + text.size() && cap > 0) {
            n = std::min(n, cap);
        }
    }
    return n;
}

namespace {

constexpr std::int64_t kChunk = 64;

// Per-record sums of the moment deviations: re, im and |.|^2.
struct Sums {
    std::vector<double> re, im, sq;

    Sums() = default;
    explicit Sums(std::size_t n) : re(n, 0.0), im(n, 0.0), sq(n, 0.0) {}

    void add(const Sums& o) {
        for (std::size_t i = 0; i < re.size(); ++i) {
            re[i] += o.re[i];
            im[i] += o.im[i];
            sq[i] += o.sq[i];
        }
    }
};

Sums combine(std::vector<Sums>& parts, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return std::move(parts[lo]);
    const std::size_t mid = lo + (hi - lo) / 2;
    Sums left = combine(parts, lo, mid);
    left.add(combine(parts, mid, hi));
    return left;
}

struct Member {
    double weight;
    Vector psi;
};

}  // namespace

TrajectoryEnsemble run_ensemble(const DensityMatrix& rho0, const KickConfig& cfg,
                                unsigned threads) {
    cfg.validate();
    const HalfInt J = rho0.J;
    const int d = J.dim();
    const auto basis = TensorBasis::shared(J);
    const std::size_t nm = basis->size();

    std::vector<int> records = cfg.record_steps;
    if (records.empty()) records = {0, cfg.n_steps};
    std::sort(records.begin(), records.end());
    records.erase(std::unique(records.begin(), records.end()), records.end());
    const std::size_t nr = records.size();

    // Pure components of rho0.
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho0.mat);
    std::vector<Member> members;
    for (Eigen::Index i = es.eigenvalues().size() - 1; i >= 0; --i) {
        const double w = es.eigenvalues()(i);
        if (w > 1e-14) members.push_back({w, es.eigenvectors().col(i)});
    }
    Matrix start = Matrix::Zero(d, d);
    for (const auto& m : members) start += m.weight * (m.psi * m.psi.adjoint());

    std::vector<Matrix> conj_ops(nm);
    for (std::size_t j = 0; j < nm; ++j) conj_ops[j] = basis->op_at(j).conjugate();
    std::vector<Complex> x0(nm);
    for (std::size_t j = 0; j < nm; ++j) x0[j] = conj_ops[j].cwiseProduct(start).sum();

    const KickGenerator gen(J);
    const std::int64_t n_chunks = (cfg.n_traj + kChunk - 1) / kChunk;
    std::vector<Sums> parts(static_cast<std::size_t>(n_chunks));
    std::vector<double> drift(static_cast<std::size_t>(n_chunks), 0.0);
    const int keep = static_cast<int>(std::min<std::int64_t>(cfg.keep_states, cfg.n_traj));
    std::vector<Matrix> kept(static_cast<std::size_t>(keep));

    auto run_chunk = [&](std::int64_t c) {
        Sums s(nr * nm);
        double max_drift = 0.0;
        const std::int64_t end = std::min(cfg.n_traj, (c + 1) * kChunk);
        for (std::int64_t t = c * kChunk; t < end; ++t) {
            Rng rng = trajectory_rng(cfg.seed, static_cast<std::uint64_t>(t));
            std::vector<Member> state = members;
            std::size_t r = 0;
            for (int step = 0; step <= cfg.n_steps; ++step) {
                if (step > 0) {
                    const Matrix U = gen.unitary(draw_noise(rng), cfg.gamma, cfg.dt);
                    for (auto& m : state) m.psi = U * m.psi;
                }
                if (r < nr && records[r] == step) {
                    Matrix rho = Matrix::Zero(d, d);
                    for (const auto& m : state) rho.noalias() += m.weight * (m.psi * m.psi.adjoint());
                    for (std::size_t j = 0; j < nm; ++j) {
                        const Complex x = conj_ops[j].cwiseProduct(rho).sum() - x0[j];
                        const std::size_t idx = r * nm + j;
                        s.re[idx] += x.real();
                        s.im[idx] += x.imag();
                        s.sq[idx] += std::norm(x);
                    }
                    if (r + 1 == nr && t < keep) {
                        kept[static_cast<std::size_t>(t)] = rho;
                    }
                    ++r;
                }
            }
            for (const auto& m : state) max_drift = std::max(max_drift, std::abs(m.psi.norm() - 1.0));
        }
        parts[static_cast<std::size_t>(c)] = std::move(s);
        drift[static_cast<std::size_t>(c)] = max_drift;
    };

    const unsigned n_workers =
        std::max(1U, std::min<unsigned>(threads == 0 ? worker_count() : threads,
                                        static_cast<unsigned>(std::min<std::int64_t>(n_chunks, 1 << 16))));
    if (n_workers == 1) {
        for (std::int64_t c = 0; c < n_chunks; ++c) run_chunk(c);
    } else {
        std::atomic<std::int64_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (unsigned w = 0; w < n_workers; ++w) {
            pool.emplace_back([&] {
                for (std::int64_t c = next++; c < n_chunks; c = next++) run_chunk(c);
            });
        }
        for (auto& th : pool) th.join();
    }

    const Sums total = combine(parts, 0, parts.size());
    const auto N = static_cast<double>(cfg.n_traj);
    const MomentVector base = expand(rho0, *basis);

    TrajectoryEnsemble out;
    out.J = J;
    out.n_traj = cfg.n_traj;
    for (std::size_t r = 0; r < nr; ++r) {
        out.times.push_back(records[r] * cfg.dt);
        MomentVector mean = base;
        std::vector<double> se(nm, 0.0);
        for (std::size_t j = 0; j < nm; ++j) {
            const std::size_t idx = r * nm + j;
            const double mr = total.re[idx] / N;
            const double mi = total.im[idx] / N;
            mean.coeffs()[j] += Complex(mr, mi);
            if (cfg.n_traj > 1) {
                const double var = std::max(0.0, (total.sq[idx] - N * (mr * mr + mi * mi)) / (N - 1.0));
                se[j] = std::sqrt(var / N);
            }
        }
        out.mean.push_back(std::move(mean));
        out.std_error.push_back(std::move(se));
    }
    out.mean_state = reconstruct(out.mean.back(), *basis).state;
    for (auto& m : kept) out.states.push_back({J, std::move(m)});
    out.max_norm_drift = *std::max_element(drift.begin(), drift.end());
    if (auto w = step_size_warning(J, cfg); !w.empty()) out.warnings.push_back(std::move(w));
    return out;
}

}  // namespace spinphase
