// dense.hpp: conversion to and from Eigen dense matrices.
//
// Used as an independent reference path at small N; nothing in the sparse
// core depends on it.

#pragma once

#include "qaybe/graded_op.hpp"

#include <Eigen/Dense>

#include <complex>

namespace qaybe {

template <class Real>
using DenseMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <class Real>
DenseMatrix<Real> to_dense(const GradedOp<Real>& a) {
    const auto d = static_cast<Eigen::Index>(a.dim());
    DenseMatrix<Real> m = DenseMatrix<Real>::Zero(d, d);
    a.for_each([&](auto r, auto c, const auto& v) {
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
    });
    return m;
}

template <class Real>
GradedOp<Real> from_dense(const Superspace& s, int legs, const DenseMatrix<Real>& m) {
    std::vector<typename GradedOp<Real>::Triplet> t;
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            if (m(r, c) != std::complex<Real>{})
                t.push_back({static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(c), m(r, c)});
    return GradedOp<Real>::from_triplets(s, legs, std::move(t));
}

} // namespace qaybe
