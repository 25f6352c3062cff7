#pragma once

#include <cstddef>

#include "ssdaae/tape.hpp"

namespace ssdaae {

// Floor applied by clamped_log; every cross-entropy evaluation goes through it.
inline constexpr double kLogFloor = 1e-12;

// Elementwise binary ops require equal shapes, or one operand with a single
// element which is then broadcast against the other.
template <typename T> Var<T> add(const Var<T>& a, const Var<T>& b);
template <typename T> Var<T> sub(const Var<T>& a, const Var<T>& b);
template <typename T> Var<T> mul(const Var<T>& a, const Var<T>& b);
template <typename T> Var<T> negate(const Var<T>& a);
template <typename T> Var<T> exp(const Var<T>& a);
// Throws DomainError on any non-positive entry.
template <typename T> Var<T> log(const Var<T>& a);
// log(max(x, kLogFloor)); derivative is zero below the floor.
template <typename T> Var<T> clamped_log(const Var<T>& a);
template <typename T> Var<T> scale(const Var<T>& a, T factor);
template <typename T> Var<T> add_scalar(const Var<T>& a, T offset);

template <typename T> Var<T> relu(const Var<T>& a);
template <typename T> Var<T> sigmoid(const Var<T>& a);

template <typename T> Var<T> sum(const Var<T>& a);
template <typename T> Var<T> mean(const Var<T>& a);

// [m x k] . [k x n]
template <typename T> Var<T> matmul(const Var<T>& a, const Var<T>& b);
// input [B x in], weight [out x in], bias [out] -> [B x out]
template <typename T> Var<T> linear(const Var<T>& input, const Var<T>& weight, const Var<T>& bias);

template <typename T> Var<T> reshape(const Var<T>& a, Shape shape);
// Concatenates two [B x n] matrices along columns.
template <typename T> Var<T> concat_columns(const Var<T>& a, const Var<T>& b);

// Cross-correlation. input [B x C x H x W], weight [O x C x k x k], bias [O].
template <typename T>
Var<T> conv2d(const Var<T>& input, const Var<T>& weight, const Var<T>& bias,
              std::size_t stride, std::size_t padding);

// Adjoint of conv2d with respect to its input. input [B x C x H x W],
// weight [C x O x k x k] (same layout as the forward conv it transposes), bias [O].
template <typename T>
Var<T> conv_transpose2d(const Var<T>& input, const Var<T>& weight, const Var<T>& bias,
                        std::size_t stride, std::size_t padding, std::size_t output_padding);

template <typename T> Var<T> operator+(const Var<T>& a, const Var<T>& b) { return add(a, b); }
template <typename T> Var<T> operator-(const Var<T>& a, const Var<T>& b) { return sub(a, b); }
template <typename T> Var<T> operator*(const Var<T>& a, const Var<T>& b) { return mul(a, b); }
template <typename T> Var<T> operator-(const Var<T>& a) { return negate(a); }

}  // namespace ssdaae
