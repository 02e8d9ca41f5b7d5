#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace strain_cascade
{

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Array shapes or state dimensions do not match the parameter set.
class DimensionError : public Error
{
public:
    using Error::Error;
};

/// An operation was called on input outside its documented domain.
class PreconditionError : public Error
{
public:
    using Error::Error;
};

/// Floating point breakdown: singular solve, iteration cap, integrator failure.
class NumericError : public Error
{
public:
    using Error::Error;
};

/// Lotka-Volterra equilibrium search that did not reach its residual target.
class LvConvergenceError : public NumericError
{
public:
    LvConvergenceError(const std::string& what, std::vector<double> best_iterate, double residual)
        : NumericError(what)
        , m_best_iterate(std::move(best_iterate))
        , m_residual(residual)
    {
    }

    const std::vector<double>& best_iterate() const
    {
        return m_best_iterate;
    }
    double residual() const
    {
        return m_residual;
    }

private:
    std::vector<double> m_best_iterate;
    double m_residual;
};

} // namespace strain_cascade
