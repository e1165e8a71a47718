#pragma once

// Per-midpoint and per-node evaluation kernels. The default versions run the
// independent evaluations under OpenMP; the serial namespace holds the
// reference implementations. Reductions are always summed serially in index
// order so both produce identical results.

#include <philap/discretization.hpp>

#include <vector>

namespace philap::kernels {

/// Loops shorter than this stay serial.
inline constexpr int kParallelGrain = 256;

/// Fluxes phi(Du_i), M x N.
NodeMat midpoint_flux(const PhiMap& phi, const NodeMat& du);
/// Phi(Du_i), length M.
std::vector<double> midpoint_potential(const PhiMap& phi, const NodeMat& du);
/// Jacobians of phi at Du_i, M blocks of N x N, column-major.
std::vector<double> midpoint_jacobian(const PhiMap& phi, const NodeMat& du);
/// F(t_i, u_i), length M + 1.
std::vector<double> node_potential(const ProblemSpec& spec, const GridFunction& u);
/// grad F(t_i, u_i), (M + 1) x N.
NodeMat node_gradient(const ProblemSpec& spec, const GridFunction& u);
/// Hessians of F at the nodes, M + 1 blocks of N x N, column-major.
std::vector<double> node_hessian(const ProblemSpec& spec, const GridFunction& u);

namespace serial {
NodeMat midpoint_flux(const PhiMap& phi, const NodeMat& du);
std::vector<double> midpoint_potential(const PhiMap& phi, const NodeMat& du);
std::vector<double> midpoint_jacobian(const PhiMap& phi, const NodeMat& du);
std::vector<double> node_potential(const ProblemSpec& spec, const GridFunction& u);
NodeMat node_gradient(const ProblemSpec& spec, const GridFunction& u);
std::vector<double> node_hessian(const ProblemSpec& spec, const GridFunction& u);
}  // namespace serial

}  // namespace philap::kernels
