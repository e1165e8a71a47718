#include <philap/kernels.hpp>

#include <exception>
#include <span>

namespace philap::kernels {

namespace {

// Runs body(i) for i in [0, n). Exceptions thrown inside the parallel region are
// captured and the first one (lowest index) is rethrown afterwards.
template <class Body>
void for_each_index(int n, bool parallel, Body&& body) {
  if (!parallel) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr first;
  int first_index = n;
#pragma omp parallel for schedule(static) if (n >= kParallelGrain)
  for (int i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(philap_kernel_error)
      if (i < first_index) {
        first_index = i;
        first = std::current_exception();
      }
    }
  }
  if (first) std::rethrow_exception(first);
}

template <bool Parallel>
NodeMat flux_impl(const PhiMap& phi, const NodeMat& du) {
  const auto n = static_cast<std::size_t>(du.cols());
  NodeMat out(du.rows(), du.cols());
  for_each_index(static_cast<int>(du.rows()), Parallel, [&](int i) {
    phi.phi(std::span<const double>(du.row(i).data(), n), std::span<double>(out.row(i).data(), n));
  });
  return out;
}

template <bool Parallel>
std::vector<double> potential_impl(const PhiMap& phi, const NodeMat& du) {
  const auto n = static_cast<std::size_t>(du.cols());
  std::vector<double> out(static_cast<std::size_t>(du.rows()));
  for_each_index(static_cast<int>(du.rows()), Parallel, [&](int i) {
    out[static_cast<std::size_t>(i)] = phi.potential(std::span<const double>(du.row(i).data(), n));
  });
  return out;
}

template <bool Parallel>
std::vector<double> jacobian_impl(const PhiMap& phi, const NodeMat& du) {
  const auto n = static_cast<std::size_t>(du.cols());
  std::vector<double> out(static_cast<std::size_t>(du.rows()) * n * n);
  for_each_index(static_cast<int>(du.rows()), Parallel, [&](int i) {
    phi.jacobian(std::span<const double>(du.row(i).data(), n),
                 std::span<double>(out.data() + static_cast<std::size_t>(i) * n * n, n * n));
  });
  return out;
}

template <bool Parallel>
std::vector<double> node_potential_impl(const ProblemSpec& spec, const GridFunction& u) {
  const int m = u.grid.M;
  std::vector<double> out(static_cast<std::size_t>(m + 1));
  for_each_index(m + 1, Parallel, [&](int i) {
    out[static_cast<std::size_t>(i)] = spec.potential.F(u.grid.node(i), u.node(i));
  });
  return out;
}

template <bool Parallel>
NodeMat node_gradient_impl(const ProblemSpec& spec, const GridFunction& u) {
  const int m = u.grid.M;
  NodeMat out(m + 1, u.dim());
  for_each_index(m + 1, Parallel, [&](int i) {
    out.row(i) = spec.potential.grad(u.grid.node(i), u.node(i)).transpose();
  });
  return out;
}

template <bool Parallel>
std::vector<double> node_hessian_impl(const ProblemSpec& spec, const GridFunction& u) {
  const int m = u.grid.M;
  const auto n = static_cast<std::size_t>(u.dim());
  std::vector<double> out(static_cast<std::size_t>(m + 1) * n * n);
  for_each_index(m + 1, Parallel, [&](int i) {
    const Mat H = spec.potential.hess(u.grid.node(i), u.node(i));
    std::copy(H.data(), H.data() + n * n, out.data() + static_cast<std::size_t>(i) * n * n);
  });
  return out;
}

}  // namespace

NodeMat midpoint_flux(const PhiMap& phi, const NodeMat& du) { return flux_impl<true>(phi, du); }
std::vector<double> midpoint_potential(const PhiMap& phi, const NodeMat& du) {
  return potential_impl<true>(phi, du);
}
std::vector<double> midpoint_jacobian(const PhiMap& phi, const NodeMat& du) {
  return jacobian_impl<true>(phi, du);
}
std::vector<double> node_potential(const ProblemSpec& spec, const GridFunction& u) {
  return node_potential_impl<true>(spec, u);
}
NodeMat node_gradient(const ProblemSpec& spec, const GridFunction& u) {
  return node_gradient_impl<true>(spec, u);
}
std::vector<double> node_hessian(const ProblemSpec& spec, const GridFunction& u) {
  return node_hessian_impl<true>(spec, u);
}

namespace serial {
NodeMat midpoint_flux(const PhiMap& phi, const NodeMat& du) { return flux_impl<false>(phi, du); }
std::vector<double> midpoint_potential(const PhiMap& phi, const NodeMat& du) {
  return potential_impl<false>(phi, du);
}
std::vector<double> midpoint_jacobian(const PhiMap& phi, const NodeMat& du) {
  return jacobian_impl<false>(phi, du);
}
std::vector<double> node_potential(const ProblemSpec& spec, const GridFunction& u) {
  return node_potential_impl<false>(spec, u);
}
NodeMat node_gradient(const ProblemSpec& spec, const GridFunction& u) {
  return node_gradient_impl<false>(spec, u);
}
std::vector<double> node_hessian(const ProblemSpec& spec, const GridFunction& u) {
  return node_hessian_impl<false>(spec, u);
}
}  // namespace serial

}  // namespace philap::kernels
