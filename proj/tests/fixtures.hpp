#pragma once

#include <memory>
#include <vector>

#include "icbpg/problem.hpp"
#include "icbpg/prox.hpp"
#include "oracles.hpp"

namespace fixtures {

inline icbpg::CompositeProblem problem(const oracle::Mat& A, const oracle::Vec& b, std::vector<icbpg::Index> sizes,
                                       double lambda, icbpg::ProblemOptions opts = {}) {
  return icbpg::CompositeProblem(oracle::sparse(A), b, icbpg::BlockPartition(std::move(sizes)), lambda, opts);
}

inline icbpg::ProxQuery query(const oracle::Mat& B, const oracle::Vec& x, const oracle::Vec& g, double lambda,
                              double delta) {
  icbpg::ProxQuery q;
  q.x = x;
  q.g = g;
  q.delta = delta;
  q.metric = std::make_shared<const icbpg::BlockMetric>(icbpg::BlockMetric::dense(B));
  q.psi = icbpg::make_l1(lambda);
  return q;
}

}  // namespace fixtures
