#include "faasplan/ctmc/qbd.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <ostream>

#include <Eigen/SparseLU>
#include <fmt/format.h>

#include "faasplan/core/errors.hpp"

namespace faasplan::ctmc {

QbdChain::QbdChain(double lambda, double mu, double alpha, double beta, int phases)
    : lambda_(lambda), mu_(mu), alpha_(alpha), beta_(beta), phases_(phases) {
    if (!(lambda > 0.0 && mu > 0.0 && alpha > 0.0 && beta > 0.0))
        throw InvalidArgument(fmt::format("chain rates must be > 0 (lambda={}, mu={}, alpha={}, beta={})", lambda,
                                          mu, alpha, beta));
    if (phases < 1) throw InvalidArgument(fmt::format("phase count must be >= 1 (got {})", phases));
}

Matrix QbdChain::boundary_local() const {
    const auto n = static_cast<Eigen::Index>(boundary_size());
    const double phase_rate = phases_ * beta_;
    Matrix b = Matrix::Zero(n, n);
    b(0, 0) = -lambda_;
    for (Eigen::Index p = 1; p < n; ++p) {
        const Eigen::Index next = (p + 1 < n) ? p + 1 : 0;
        b(p, next) += phase_rate;
        b(p, p) = -(lambda_ + phase_rate);
    }
    return b;
}

Matrix QbdChain::boundary_up() const {
    const auto n = static_cast<Eigen::Index>(boundary_size());
    Matrix b = Matrix::Zero(n, 2);
    b(0, 0) = lambda_;
    for (Eigen::Index p = 1; p < n; ++p) b(p, 1) = lambda_;
    return b;
}

Matrix QbdChain::level1_down() const {
    Matrix b = Matrix::Zero(2, static_cast<Eigen::Index>(boundary_size()));
    b(1, 1) = mu_;  // the idle timer restarts at phase 1 whenever the function empties
    return b;
}

Matrix2 QbdChain::up() const { return lambda_ * Matrix2::Identity(); }

Matrix2 QbdChain::local() const {
    Matrix2 a;
    a << -(lambda_ + alpha_), alpha_, 0.0, -(lambda_ + mu_);
    return a;
}

Matrix2 QbdChain::down() const {
    Matrix2 a;
    a << 0.0, 0.0, 0.0, mu_;
    return a;
}

SparseMatrix QbdChain::truncated_generator(std::size_t levels) const {
    const auto nb = static_cast<Eigen::Index>(boundary_size());
    const auto n = static_cast<Eigen::Index>(state_count(levels));
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(n) * 4);
    auto add_block = [&](const Matrix& block, Eigen::Index row0, Eigen::Index col0) {
        for (Eigen::Index r = 0; r < block.rows(); ++r)
            for (Eigen::Index c = 0; c < block.cols(); ++c)
                if (block(r, c) != 0.0) t.emplace_back(row0 + r, col0 + c, block(r, c));
    };
    auto level_offset = [&](std::size_t j) { return nb + 2 * static_cast<Eigen::Index>(j - 1); };

    Matrix b00 = boundary_local();
    if (levels == 0) b00.diagonal().array() += lambda_;
    add_block(b00, 0, 0);
    if (levels >= 1) {
        add_block(boundary_up(), 0, level_offset(1));
        add_block(level1_down(), level_offset(1), 0);
    }
    for (std::size_t j = 1; j <= levels; ++j) {
        Matrix a1 = local();
        if (j == levels) a1.diagonal().array() += lambda_;
        add_block(a1, level_offset(j), level_offset(j));
        if (j < levels) add_block(up(), level_offset(j), level_offset(j + 1));
        if (j >= 2) add_block(down(), level_offset(j), level_offset(j - 1));
    }
    SparseMatrix q(n, n);
    q.setFromTriplets(t.begin(), t.end());
    return q;
}

QbdChain build_chain(const FunctionProfile& profile, double lambda_i, double t_i, int phases) {
    if (!(t_i > 0.0)) throw InvalidArgument(fmt::format("idle time must be > 0 (got {})", t_i));
    if (!std::isfinite(t_i)) throw InvalidArgument("idle time must be finite for the chain");
    if (!(lambda_i > 0.0)) throw InvalidArgument(fmt::format("arrival rate must be > 0 (got {})", lambda_i));
    if (lambda_i >= profile.mu)
        throw ModelError(fmt::format("function {}: unstable chain, lambda {} >= mu {}", profile.id, lambda_i,
                                     profile.mu));
    return QbdChain(lambda_i, profile.mu, profile.alpha, 1.0 / t_i, phases);
}

double StationaryDistribution::total_mass() const {
    double s = tail[0] + tail[1];
    for (double b : boundary) s += b;
    for (const auto& l : levels) s += l[0] + l[1];
    return s;
}

double StationaryDistribution::cold_mass() const {
    double s = boundary.empty() ? 0.0 : boundary[0];
    for (const auto& l : levels) s += l[0];
    return s + tail[0];
}

Eigen::VectorXd StationaryDistribution::dense(std::size_t n_levels) const {
    const auto nb = static_cast<Eigen::Index>(boundary.size());
    Eigen::VectorXd v = Eigen::VectorXd::Zero(nb + 2 * static_cast<Eigen::Index>(n_levels));
    for (Eigen::Index i = 0; i < nb; ++i) v(i) = boundary[static_cast<std::size_t>(i)];
    for (std::size_t j = 0; j < std::min(n_levels, levels.size()); ++j) {
        v(nb + 2 * static_cast<Eigen::Index>(j)) = levels[j][0];
        v(nb + 2 * static_cast<Eigen::Index>(j) + 1) = levels[j][1];
    }
    return v;
}

namespace {

double spectral_radius(const Matrix2& m) {
    const Eigen::EigenSolver<Matrix2> es(m, false);
    double r = 0.0;
    for (Eigen::Index i = 0; i < 2; ++i) r = std::max(r, std::abs(es.eigenvalues()(i)));
    return r;
}

// Natural fixed point R <- -(A0 + R^2 A2) A1^{-1}, used when logarithmic
// reduction fails to reach its tolerance.
Matrix2 rate_matrix_fixed_point(const QbdChain& chain, const SolverOptions& options, int& steps) {
    const Matrix2 a0 = chain.up();
    const Matrix2 a2 = chain.down();
    const Matrix2 a1_inv = chain.local().inverse();
    Matrix2 r = Matrix2::Zero();
    for (steps = 1; steps <= options.max_fixed_point_steps; ++steps) {
        const Matrix2 next = -(a0 + r * r * a2) * a1_inv;
        const double change = (next - r).cwiseAbs().maxCoeff();
        r = next;
        if (change < options.fixed_point_tolerance) return r;
    }
    throw NumericalError(fmt::format("rate matrix fixed point did not converge in {} steps (lambda={}, mu={}, "
                                     "alpha={})",
                                     options.max_fixed_point_steps, chain.lambda(), chain.mu(), chain.alpha()));
}

}  // namespace

RateMatrixResult solve_rate_matrix(const QbdChain& chain, const SolverOptions& options) {
    if (!chain.stable())
        throw ModelError(fmt::format("unstable chain: lambda {} >= mu {}", chain.lambda(), chain.mu()));
    const Matrix2 a0 = chain.up();
    const Matrix2 a1 = chain.local();
    const Matrix2 a2 = chain.down();
    const Matrix2 id = Matrix2::Identity();

    // Logarithmic reduction for G, the first-passage matrix one level down.
    const Matrix2 neg_a1_inv = (-a1).inverse();
    Matrix2 b_up = neg_a1_inv * a0;
    Matrix2 b_down = neg_a1_inv * a2;
    Matrix2 g = b_down;
    Matrix2 t = b_up;
    const Eigen::Vector2d ones = Eigen::Vector2d::Ones();
    for (int step = 1; step <= options.max_reduction_steps; ++step) {
        const Matrix2 u = b_up * b_down + b_down * b_up;
        const Matrix2 inv = (id - u).inverse();
        const Matrix2 next_up = inv * b_up * b_up;
        const Matrix2 next_down = inv * b_down * b_down;
        g += t * next_down;
        t = t * next_up;
        b_up = next_up;
        b_down = next_down;
        if ((ones - g * ones).cwiseAbs().maxCoeff() < options.g_tolerance) {
            const Matrix2 r = a0 * (-(a1 + a0 * g)).inverse();
            if (r.allFinite() && (r.array() >= -1e-15).all()) return {r, step, false};
            break;
        }
    }
    RateMatrixResult res;
    res.r = rate_matrix_fixed_point(chain, options, res.steps);
    res.used_fallback = true;
    return res;
}

StationaryDistribution solve_stationary(const QbdChain& chain, const SolverOptions& options) {
    const RateMatrixResult rate = solve_rate_matrix(chain, options);
    const Matrix2& r = rate.r;
    const auto nb = static_cast<Eigen::Index>(chain.boundary_size());
    const Eigen::Index n = nb + 2;

    // Rows of the censored generator on levels {0, 1}.
    Matrix m = Matrix::Zero(n, n);
    m.topLeftCorner(nb, nb) = chain.boundary_local();
    m.topRightCorner(nb, 2) = chain.boundary_up();
    m.bottomLeftCorner(2, nb) = chain.level1_down();
    m.bottomRightCorner(2, 2) = chain.local() + r * chain.down();

    const Matrix2 id = Matrix2::Identity();
    const Eigen::Vector2d level_weights = (id - r).inverse() * Eigen::Vector2d::Ones();

    // x m = 0 with one balance equation replaced by normalisation.
    Matrix sys = m.transpose();
    sys.row(0).setOnes();
    sys(0, nb) = level_weights(0);
    sys(0, nb + 1) = level_weights(1);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(0) = 1.0;
    const Eigen::FullPivLU<Matrix> lu(sys);
    if (!lu.isInvertible()) throw NumericalError("boundary system of the cold-start chain is singular");
    const Eigen::VectorXd x = lu.solve(rhs);
    if (!x.allFinite()) throw NumericalError("boundary solve produced non-finite probabilities");

    StationaryDistribution dist;
    dist.decay_rate = spectral_radius(r);
    dist.boundary.resize(static_cast<std::size_t>(nb));
    for (Eigen::Index i = 0; i < nb; ++i) dist.boundary[static_cast<std::size_t>(i)] = std::max(0.0, x(i));

    Eigen::RowVector2d level(std::max(0.0, x(nb)), std::max(0.0, x(nb + 1)));
    while (dist.levels.size() < options.max_stored_levels) {
        dist.levels.push_back({level(0), level(1)});
        level = level * r;
        if (level.sum() < options.stored_level_tolerance) break;
    }
    const Eigen::RowVector2d tail = level * (id - r).inverse();
    dist.tail = {std::max(0.0, tail(0)), std::max(0.0, tail(1))};
    return dist;
}

double cold_start_probability(const StationaryDistribution& dist) { return dist.cold_mass(); }

double cold_start_probability(const FunctionProfile& profile, double lambda_i, double t_i, int phases) {
    return cold_start_probability(solve_stationary(build_chain(profile, lambda_i, t_i, phases)));
}

StationaryDistribution truncation_oracle(const QbdChain& chain, std::size_t max_level) {
    if (!chain.stable())
        throw ModelError(fmt::format("unstable chain: lambda {} >= mu {}", chain.lambda(), chain.mu()));
    if (max_level < 1) throw InvalidArgument("truncation oracle needs at least one level");
    const int k = chain.phases();
    const double lam = chain.lambda();
    const double mu = chain.mu();
    const double alpha = chain.alpha();
    const double phase_rate = k * chain.beta();
    const auto n = static_cast<Eigen::Index>(k + 1 + 2 * max_level);

    auto cold = [&](std::size_t j) -> Eigen::Index {
        return j == 0 ? 0 : static_cast<Eigen::Index>(k + 1 + 2 * (j - 1));
    };
    auto warm = [&](std::size_t j) -> Eigen::Index { return static_cast<Eigen::Index>(k + 1 + 2 * (j - 1) + 1); };
    auto idle = [&](int p) -> Eigen::Index { return p; };

    // Transitions (from, to, rate) from the chain's rules.
    std::vector<Eigen::Triplet<double>> moves;
    moves.emplace_back(cold(0), cold(1), lam);
    for (int p = 1; p <= k; ++p) {
        moves.emplace_back(idle(p), p < k ? idle(p + 1) : cold(0), phase_rate);
        moves.emplace_back(idle(p), warm(1), lam);
    }
    for (std::size_t j = 1; j <= max_level; ++j) {
        moves.emplace_back(cold(j), warm(j), alpha);
        if (j < max_level) {
            moves.emplace_back(cold(j), cold(j + 1), lam);
            moves.emplace_back(warm(j), warm(j + 1), lam);
        }
        moves.emplace_back(warm(j), j == 1 ? idle(1) : warm(j - 1), mu);
    }

    // Solve Q^T pi = 0 with the equation of state 0 replaced by sum(pi) = 1.
    std::vector<double> out_rate(static_cast<std::size_t>(n), 0.0);
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(moves.size() * 2 + static_cast<std::size_t>(n));
    for (const auto& mv : moves) {
        out_rate[static_cast<std::size_t>(mv.row())] += mv.value();
        if (mv.col() != 0) t.emplace_back(mv.col(), mv.row(), mv.value());
    }
    for (Eigen::Index s = 0; s < n; ++s) {
        if (s != 0) t.emplace_back(s, s, -out_rate[static_cast<std::size_t>(s)]);
        t.emplace_back(0, s, 1.0);
    }
    SparseMatrix a(n, n);
    a.setFromTriplets(t.begin(), t.end());
    a.makeCompressed();
    Eigen::SparseLU<SparseMatrix> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) throw NumericalError("truncation oracle: singular generator");
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(0) = 1.0;
    const Eigen::VectorXd pi = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !pi.allFinite()) throw NumericalError("truncation oracle: solve failed");

    StationaryDistribution dist;
    dist.boundary.resize(static_cast<std::size_t>(k) + 1);
    dist.boundary[0] = std::max(0.0, pi(cold(0)));
    for (int p = 1; p <= k; ++p) dist.boundary[static_cast<std::size_t>(p)] = std::max(0.0, pi(idle(p)));
    dist.levels.resize(max_level);
    for (std::size_t j = 1; j <= max_level; ++j)
        dist.levels[j - 1] = {std::max(0.0, pi(cold(j))), std::max(0.0, pi(warm(j)))};
    return dist;
}

CertifiedOracle certified_truncation_oracle(const QbdChain& chain, std::size_t start_level, double tolerance,
                                            std::size_t level_cap) {
    CertifiedOracle out;
    out.max_level = std::max<std::size_t>(start_level, 1);
    out.distribution = truncation_oracle(chain, out.max_level);
    double prev = cold_start_probability(out.distribution);
    while (out.max_level < level_cap) {
        const std::size_t next_level = out.max_level * 2;
        auto next = truncation_oracle(chain, next_level);
        const double cur = cold_start_probability(next);
        out.last_change = std::abs(cur - prev);
        out.distribution = std::move(next);
        out.max_level = next_level;
        if (out.last_change < tolerance) return out;
        prev = cur;
    }
    throw NumericalError(fmt::format("truncation oracle did not settle below level {}", level_cap));
}

double total_variation(const StationaryDistribution& a, const StationaryDistribution& b) {
    if (a.boundary.size() != b.boundary.size())
        throw InvalidArgument("total_variation: distributions have different phase counts");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.boundary.size(); ++i) sum += std::abs(a.boundary[i] - b.boundary[i]);
    const std::size_t common = std::min(a.levels.size(), b.levels.size());
    for (std::size_t j = 0; j < common; ++j)
        for (int c = 0; c < 2; ++c) sum += std::abs(a.levels[j][c] - b.levels[j][c]);
    auto remainder = [common](const StationaryDistribution& d) {
        std::array<double, 2> rem = d.tail;
        for (std::size_t j = common; j < d.levels.size(); ++j) {
            rem[0] += d.levels[j][0];
            rem[1] += d.levels[j][1];
        }
        return rem;
    };
    const auto ra = remainder(a);
    const auto rb = remainder(b);
    sum += std::abs(ra[0] - rb[0]) + std::abs(ra[1] - rb[1]);
    return 0.5 * sum;
}

double residual_norm(const QbdChain& chain, const StationaryDistribution& dist) {
    const std::size_t levels = dist.levels.size();
    const SparseMatrix q = chain.truncated_generator(levels);
    const Eigen::VectorXd pi = dist.dense(levels);
    const Eigen::VectorXd res = q.transpose() * pi;
    return res.cwiseAbs().maxCoeff();
}

void write_state_csv(std::ostream& out, const StationaryDistribution& dist) {
    out << "state,level,phase,probability\n";
    if (!dist.boundary.empty()) out << fmt::format("\"(0,0)\",0,0,{:.17g}\n", dist.boundary[0]);
    for (std::size_t p = 1; p < dist.boundary.size(); ++p)
        out << fmt::format("\"(1,0)_{}\",0,{},{:.17g}\n", p, p, dist.boundary[p]);
    for (std::size_t j = 0; j < dist.levels.size(); ++j) {
        out << fmt::format("\"(0,{})\",{},0,{:.17g}\n", j + 1, j + 1, dist.levels[j][0]);
        out << fmt::format("\"(1,{})\",{},1,{:.17g}\n", j + 1, j + 1, dist.levels[j][1]);
    }
    if (dist.tail[0] > 0.0 || dist.tail[1] > 0.0) {
        const std::size_t next = dist.levels.size() + 1;
        out << fmt::format("\"(0,>={})\",{},0,{:.17g}\n", next, next, dist.tail[0]);
        out << fmt::format("\"(1,>={})\",{},1,{:.17g}\n", next, next, dist.tail[1]);
    }
}

}  // namespace faasplan::ctmc
