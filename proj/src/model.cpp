#include "strain_cascade/model.hpp"
#include "strain_cascade/errors.hpp"

#include <cmath>
#include <sstream>

namespace strain_cascade
{

double ModelParameters::outflow(std::size_t patch) const
{
    double out = 0.0;
    for (std::size_t i = 0; i < patches; ++i) {
        if (i != patch) {
            out += migration[i][patch];
        }
    }
    return out;
}

StateVector::StateVector(std::size_t patches, std::size_t strains)
    : m_patches(patches)
    , m_strains(strains)
    , m_values(patches * (strains + 1), 0.0)
{
}

StateVector::StateVector(std::size_t patches, std::size_t strains, std::vector<double> values)
    : m_patches(patches)
    , m_strains(strains)
    , m_values(std::move(values))
{
    if (m_values.size() != patches * (strains + 1)) {
        throw DimensionError("StateVector: expected " + std::to_string(patches * (strains + 1)) + " components, got " +
                             std::to_string(m_values.size()));
    }
}

double StateVector::total(std::size_t patch) const
{
    double n = susceptible(patch);
    for (std::size_t k = 0; k < m_strains; ++k) {
        n += infected(patch, k);
    }
    return n;
}

std::string Violation::to_string() const
{
    std::ostringstream out;
    out << field;
    for (auto i : index) {
        out << '[' << i << ']';
    }
    out << ": " << reason;
    return out.str();
}

SquareMatrix full_beta(const ModelParameters& params, std::size_t patch)
{
    if (patch >= params.patches || patch >= params.beta_diag.size()) {
        throw PreconditionError("full_beta: patch index " + std::to_string(patch) + " out of range");
    }
    const auto& diag = params.beta_diag[patch];
    const std::size_t n = diag.size();
    SquareMatrix beta(n);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < n; ++j) {
            beta(k, j) = j <= k ? diag[k] : -diag[j];
        }
    }
    return beta;
}

SquareMatrix connectivity_matrix(const ModelParameters& params)
{
    const std::size_t p = params.patches;
    SquareMatrix M(p);
    for (std::size_t l = 0; l < p; ++l) {
        for (std::size_t i = 0; i < p; ++i) {
            if (i != l) {
                M(l, i) = params.migration[l][i];
            }
        }
        M(l, l) = -params.outflow(l);
    }
    return M;
}

namespace
{

class ViolationSink
{
public:
    void add(std::string field, std::vector<std::size_t> index, std::string reason)
    {
        m_list.push_back({std::move(field), std::move(index), std::move(reason)});
    }
    std::vector<Violation> take()
    {
        return std::move(m_list);
    }
    bool empty() const
    {
        return m_list.empty();
    }

private:
    std::vector<Violation> m_list;
};

bool check_rate(ViolationSink& sink, const std::string& field, std::vector<std::size_t> index, double value,
                bool strictly_positive)
{
    if (!std::isfinite(value)) {
        sink.add(field, std::move(index), "not finite");
        return false;
    }
    if (strictly_positive && !(value > 0.0)) {
        sink.add(field, std::move(index), "must be > 0");
        return false;
    }
    if (!strictly_positive && value < 0.0) {
        sink.add(field, std::move(index), "must be >= 0");
        return false;
    }
    return true;
}

} // namespace

std::vector<Violation> validate(const ModelParameters& params)
{
    ViolationSink sink;
    const std::size_t p = params.patches;
    const std::size_t n = params.strains;
    if (p == 0) {
        sink.add("patches", {}, "must be a positive integer");
    }
    if (n == 0) {
        sink.add("strains", {}, "must be a positive integer");
    }

    auto per_patch = [&](const std::string& field, const std::vector<double>& values) {
        if (values.size() != p) {
            sink.add(field, {}, "expected " + std::to_string(p) + " entries, got " + std::to_string(values.size()));
            return;
        }
        for (std::size_t l = 0; l < p; ++l) {
            check_rate(sink, field, {l}, values[l], true);
        }
    };
    per_patch("birth", params.birth);
    per_patch("death", params.death);

    auto per_strain = [&](const std::string& field, const std::vector<std::vector<double>>& values,
                          bool strictly_positive) {
        if (values.size() != p) {
            sink.add(field, {}, "expected " + std::to_string(p) + " rows, got " + std::to_string(values.size()));
            return;
        }
        for (std::size_t l = 0; l < p; ++l) {
            if (values[l].size() != n) {
                sink.add(field, {l},
                         "expected " + std::to_string(n) + " entries, got " + std::to_string(values[l].size()));
                continue;
            }
            for (std::size_t k = 0; k < n; ++k) {
                check_rate(sink, field, {l, k}, values[l][k], strictly_positive);
            }
        }
    };
    per_strain("beta_diag", params.beta_diag, true);
    per_strain("theta", params.theta, false);

    bool migration_shape_ok = params.migration.size() == p;
    if (!migration_shape_ok) {
        sink.add("migration", {}, "expected " + std::to_string(p) + " rows, got " + std::to_string(params.migration.size()));
    } else {
        for (std::size_t l = 0; l < p; ++l) {
            if (params.migration[l].size() != p) {
                sink.add("migration", {l},
                         "expected " + std::to_string(p) + " entries, got " + std::to_string(params.migration[l].size()));
                migration_shape_ok = false;
                continue;
            }
            for (std::size_t i = 0; i < p; ++i) {
                const double m = params.migration[l][i];
                if (l == i) {
                    if (m != 0.0) {
                        sink.add("migration", {l, i}, "diagonal entry must be exactly 0");
                    }
                } else if (!check_rate(sink, "migration", {l, i}, m, false)) {
                    migration_shape_ok = false;
                }
            }
        }
    }

    if (migration_shape_ok && p > 1 && !is_irreducible(connectivity_matrix(params))) {
        sink.add("migration", {}, "reducible connectivity: patch network is not strongly connected");
    }
    return sink.take();
}

void rhs_into(const ModelParameters& params, std::span<const double> state, std::span<double> out)
{
    const std::size_t p = params.patches;
    const std::size_t n = params.strains;
    const std::size_t stride = n + 1;
    if (state.size() != p * stride || out.size() != p * stride) {
        throw DimensionError("rhs: state dimension " + std::to_string(state.size()) + " does not match (n+1)p = " +
                             std::to_string(p * stride));
    }

    for (std::size_t l = 0; l < p; ++l) {
        const double* x = state.data() + l * stride;
        double* dx = out.data() + l * stride;
        const auto& beta = params.beta_diag[l];
        const auto& theta = params.theta[l];
        const double S = x[0];
        const double b = params.death[l];

        double infection = 0.0;
        double recovery = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            infection += beta[k] * x[1 + k];
            recovery += theta[k] * x[1 + k];
        }
        dx[0] = params.birth[l] - b * S - S * infection + recovery;

        // Superinfection: strain k gains beta_kk T_k T_j from every milder j < k and
        // loses beta_jj T_k T_j to every more virulent j > k.
        double milder = 0.0;
        double stronger = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            stronger += beta[j] * x[1 + j];
        }
        for (std::size_t k = 0; k < n; ++k) {
            const double T = x[1 + k];
            stronger -= beta[k] * T;
            dx[1 + k] = T * (S * beta[k] + beta[k] * milder - stronger - (b + theta[k]));
            milder += T;
        }

        const double out_rate = params.outflow(l);
        for (std::size_t c = 0; c < stride; ++c) {
            double inflow = 0.0;
            for (std::size_t i = 0; i < p; ++i) {
                if (i != l) {
                    inflow += params.migration[l][i] * state[i * stride + c];
                }
            }
            dx[c] += inflow - out_rate * x[c];
        }
    }
}

std::vector<double> rhs(const ModelParameters& params, const StateVector& state)
{
    if (state.patches() != params.patches || state.strains() != params.strains) {
        throw DimensionError("rhs: state shape does not match parameters");
    }
    std::vector<double> out(state.size());
    rhs_into(params, state.values(), out);
    return out;
}

} // namespace strain_cascade
