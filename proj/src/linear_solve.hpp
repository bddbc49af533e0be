#pragma once

#include <Eigen/Sparse>
#include <Eigen/UmfPackSupport>
#include <string>
#include <vector>

#include "sfcy/errors.hpp"

namespace sfcy::detail {

using Triplets = std::vector<Eigen::Triplet<double>>;

// Direct sparse LU (UMFPACK). `what` names the system in error messages.
template <class Fail = GridError>
Eigen::VectorXd solve_sparse(int n, const Triplets& entries, const Eigen::VectorXd& rhs, const std::string& what) {
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(entries.begin(), entries.end());
    A.makeCompressed();
    Eigen::UmfPackLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) throw Fail(what + ": sparse factorization failed (singular system)");
    Eigen::VectorXd x = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !x.allFinite()) throw Fail(what + ": sparse solve failed");
    return x;
}

}  // namespace sfcy::detail
