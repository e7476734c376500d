#pragma once

#include <vector>

#include "sparsekern/geometry.hpp"

namespace sparsekern {

/// One kernel of a finite expansion: a * k(., z; w).
struct Term {
    double a = 0.0;
    Vector z;
    double w = 1.0;
};

/// Finite kernel expansion sum_j a_j k(x, z_j; w_j). May be empty (the zero function).
struct DiscreteModel {
    std::vector<Term> terms;

    std::size_t size() const noexcept { return terms.size(); }
    bool empty() const noexcept { return terms.empty(); }
};

double predict_discrete(const DiscreteModel& model, Point x);
Vector predict_discrete(const DiscreteModel& model, const RowMatrix& X);

/// Mean squared residual of the model on (X, y).
double mse(const DiscreteModel& model, const RowMatrix& X, const Vector& y);

}  // namespace sparsekern
