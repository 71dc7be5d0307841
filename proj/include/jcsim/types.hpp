#ifndef JCSIM_TYPES_HPP
#define JCSIM_TYPES_HPP

#include <complex>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace jcsim {

template <typename Real>
using ComplexT = std::complex<Real>;

template <typename Real>
using SparseT = Eigen::SparseMatrix<ComplexT<Real>>;

template <typename Real>
using DenseT = Eigen::Matrix<ComplexT<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using KetT = Eigen::Matrix<ComplexT<Real>, Eigen::Dynamic, 1>;

using Complex = ComplexT<double>;
using SpMat = SparseT<double>;
using Dense = DenseT<double>;
using Ket = KetT<double>;
using Triplet = Eigen::Triplet<Complex>;

inline constexpr Complex kI{0.0, 1.0};

} // namespace jcsim

#endif // JCSIM_TYPES_HPP
