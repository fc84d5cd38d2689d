#pragma once

// Reference implementations used only by the tests. None of them calls the
// library routine it is meant to check.

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <hisparse/model.hpp>

namespace oracle {

using hisparse::Index;
using BigFloat = boost::multiprecision::cpp_dec_float_50;
using BigInt = boost::multiprecision::cpp_int;

// Flat and tree admissibility, decided directly on a bitmask of active entries.
bool flat_admissible(std::uint32_t mask, const hisparse::FlatSparsity& fp, bool maximal);
bool tree_admissible(std::uint32_t mask, const hisparse::SparsityTree::Node& root, bool maximal);

// Every admissible mask over d entries (d <= 20).
std::vector<std::uint32_t> admissible_masks(Index d, const std::function<bool(std::uint32_t)>& ok);

hisparse::SupportSet mask_to_support(std::uint32_t mask);

// Largest restricted energy over a family of masks.
double best_energy(const hisparse::RealVector& z, const std::vector<std::uint32_t>& masks);

// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations, ascending.
std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a);

// max |lambda - 1| over the Gram matrix of A restricted to `support`.
double gram_deviation(const Eigen::MatrixXd& a, const hisparse::SupportSet& support);

// Rows `rows` of the unitary DFT matrix, built entry by entry in long double.
Eigen::MatrixXcd dft_matrix(Index d, const std::vector<Index>& rows);

// Sample bound (36 / (7 delta)) (sum_i S_i s_i ln(e n_i / s_i) + ln(12/delta) + ln(1/eps))
// evaluated in 50-digit arithmetic; S_i is the product of the budgets above level i.
BigFloat sample_bound(const std::vector<hisparse::Level>& levels, const BigFloat& delta,
                      const BigFloat& epsilon);

BigInt binomial(unsigned n, unsigned k);

// Random nested tree with between 1 and max_leaves leaves and depth at most max_depth.
hisparse::SparsityTree::Node random_tree(std::mt19937_64& rng, Index max_leaves, int max_depth = 3);

// Random valid flat sparsity with N * n <= max_dim.
hisparse::FlatSparsity random_flat(std::mt19937_64& rng, Index max_dim);

}  // namespace oracle
