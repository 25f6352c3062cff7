#include "ssdaae/ops.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <string>

#include "ssdaae/errors.hpp"

namespace ssdaae {
namespace {

template <typename T>
using MatRM = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapRM = Eigen::Map<MatRM<T>>;
template <typename T>
using ConstMapRM = Eigen::Map<const MatRM<T>>;

template <typename T>
void check_same_tape(const Var<T>& a, const Var<T>& b, const char* op) {
  if (&a.tape() != &b.tape()) throw ContractError(std::string(op) + ": operands on different tapes");
}

struct BinaryLayout {
  Shape shape;
  bool a_scalar = false;
  bool b_scalar = false;
};

template <typename T>
BinaryLayout binary_layout(const Var<T>& a, const Var<T>& b, const char* op) {
  check_same_tape(a, b, op);
  if (a.shape() == b.shape()) return {a.shape(), false, false};
  if (b.numel() == 1) return {a.shape(), false, true};
  if (a.numel() == 1) return {b.shape(), true, false};
  throw ShapeError(std::string(op) + ": shape mismatch " + to_string(a.shape()) + " vs " +
                   to_string(b.shape()));
}

// Forward f(x, y); partials dx(x, y), dy(x, y).
template <typename T, typename F, typename DX, typename DY>
Var<T> binary(const Var<T>& a, const Var<T>& b, const char* name, F f, DX dx, DY dy) {
  BinaryLayout layout = binary_layout(a, b, name);
  const std::size_t n = numel(layout.shape);
  auto av = a.values();
  auto bv = b.values();
  std::vector<T> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = f(av[layout.a_scalar ? 0 : i], bv[layout.b_scalar ? 0 : i]);
  }
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(layout.shape, std::move(out), {ia, ib},
                         [=](Tape<T>& tape, std::size_t self) {
                           auto g = tape.grad(self);
                           auto x = tape.value(ia);
                           auto y = tape.value(ib);
                           const bool need_a = tape.needs_grad(ia);
                           const bool need_b = tape.needs_grad(ib);
                           std::span<T> ga, gb;
                           if (need_a) ga = tape.grad(ia);
                           if (need_b) gb = tape.grad(ib);
                           for (std::size_t i = 0; i < n; ++i) {
                             const T xi = x[layout.a_scalar ? 0 : i];
                             const T yi = y[layout.b_scalar ? 0 : i];
                             if (need_a) ga[layout.a_scalar ? 0 : i] += g[i] * dx(xi, yi);
                             if (need_b) gb[layout.b_scalar ? 0 : i] += g[i] * dy(xi, yi);
                           }
                         });
}

// Forward f(x); derivative df(x, fx).
template <typename T, typename F, typename DF>
Var<T> unary(const Var<T>& a, F f, DF df) {
  auto av = a.values();
  std::vector<T> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = f(av[i]);
  const std::size_t ia = a.id();
  return a.tape().record(a.shape(), std::move(out), {ia}, [=](Tape<T>& tape, std::size_t self) {
    auto g = tape.grad(self);
    auto x = tape.value(ia);
    auto y = tape.value(self);
    auto ga = tape.grad(ia);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * df(x[i], y[i]);
  });
}

// Unfolds one [C x H x W] image into a [(C*k*k) x (Ho*Wo)] patch matrix.
template <typename T>
void im2col(const T* image, std::size_t channels, std::size_t height, std::size_t width,
            std::size_t k, std::size_t stride, std::size_t pad, std::size_t out_h, std::size_t out_w,
            T* col) {
  const std::size_t cols = out_h * out_w;
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t ki = 0; ki < k; ++ki) {
      for (std::size_t kj = 0; kj < k; ++kj) {
        T* row = col + ((c * k + ki) * k + kj) * cols;
        for (std::size_t oh = 0; oh < out_h; ++oh) {
          const long ih = static_cast<long>(oh * stride + ki) - static_cast<long>(pad);
          T* dst = row + oh * out_w;
          if (ih < 0 || ih >= static_cast<long>(height)) {
            std::fill(dst, dst + out_w, T{0});
            continue;
          }
          const T* src = image + (c * height + static_cast<std::size_t>(ih)) * width;
          for (std::size_t ow = 0; ow < out_w; ++ow) {
            const long iw = static_cast<long>(ow * stride + kj) - static_cast<long>(pad);
            dst[ow] = (iw < 0 || iw >= static_cast<long>(width)) ? T{0} : src[iw];
          }
        }
      }
    }
  }
}

// Adjoint of im2col: scatters-adds patch columns back into the image.
template <typename T>
void col2im(const T* col, std::size_t channels, std::size_t height, std::size_t width, std::size_t k,
            std::size_t stride, std::size_t pad, std::size_t out_h, std::size_t out_w, T* image) {
  const std::size_t cols = out_h * out_w;
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t ki = 0; ki < k; ++ki) {
      for (std::size_t kj = 0; kj < k; ++kj) {
        const T* row = col + ((c * k + ki) * k + kj) * cols;
        for (std::size_t oh = 0; oh < out_h; ++oh) {
          const long ih = static_cast<long>(oh * stride + ki) - static_cast<long>(pad);
          if (ih < 0 || ih >= static_cast<long>(height)) continue;
          T* dst = image + (c * height + static_cast<std::size_t>(ih)) * width;
          const T* src = row + oh * out_w;
          for (std::size_t ow = 0; ow < out_w; ++ow) {
            const long iw = static_cast<long>(ow * stride + kj) - static_cast<long>(pad);
            if (iw >= 0 && iw < static_cast<long>(width)) dst[iw] += src[ow];
          }
        }
      }
    }
  }
}

void require_rank(const Shape& s, std::size_t rank, const char* op, const char* what) {
  if (s.size() != rank) {
    throw ShapeError(std::string(op) + ": " + what + " must have rank " + std::to_string(rank) +
                     ", got " + to_string(s));
  }
}

}  // namespace

template <typename T>
Var<T> add(const Var<T>& a, const Var<T>& b) {
  return binary(a, b, "add", [](T x, T y) { return x + y; }, [](T, T) { return T{1}; },
                [](T, T) { return T{1}; });
}

template <typename T>
Var<T> sub(const Var<T>& a, const Var<T>& b) {
  return binary(a, b, "sub", [](T x, T y) { return x - y; }, [](T, T) { return T{1}; },
                [](T, T) { return T{-1}; });
}

template <typename T>
Var<T> mul(const Var<T>& a, const Var<T>& b) {
  return binary(a, b, "mul", [](T x, T y) { return x * y; }, [](T, T y) { return y; },
                [](T x, T) { return x; });
}

template <typename T>
Var<T> negate(const Var<T>& a) {
  return unary(a, [](T x) { return -x; }, [](T, T) { return T{-1}; });
}

template <typename T>
Var<T> exp(const Var<T>& a) {
  return unary(a, [](T x) { return std::exp(x); }, [](T, T y) { return y; });
}

template <typename T>
Var<T> log(const Var<T>& a) {
  for (T x : a.values()) {
    if (!(x > T{0})) throw DomainError("log of non-positive value " + std::to_string(x));
  }
  return unary(a, [](T x) { return std::log(x); }, [](T x, T) { return T{1} / x; });
}

template <typename T>
Var<T> clamped_log(const Var<T>& a) {
  const T floor = static_cast<T>(kLogFloor);
  return unary(
      a, [floor](T x) { return std::log(std::max(x, floor)); },
      [floor](T x, T) { return x > floor ? T{1} / x : T{0}; });
}

template <typename T>
Var<T> scale(const Var<T>& a, T factor) {
  return unary(a, [factor](T x) { return factor * x; }, [factor](T, T) { return factor; });
}

template <typename T>
Var<T> add_scalar(const Var<T>& a, T offset) {
  return unary(a, [offset](T x) { return x + offset; }, [](T, T) { return T{1}; });
}

template <typename T>
Var<T> relu(const Var<T>& a) {
  return unary(a, [](T x) { return x > T{0} ? x : T{0}; },
               [](T x, T) { return x > T{0} ? T{1} : T{0}; });
}

template <typename T>
Var<T> sigmoid(const Var<T>& a) {
  return unary(
      a,
      [](T x) {
        // Split by sign so exp never overflows.
        if (x >= T{0}) return T{1} / (T{1} + std::exp(-x));
        const T e = std::exp(x);
        return e / (T{1} + e);
      },
      [](T, T y) { return y * (T{1} - y); });
}

template <typename T>
Var<T> sum(const Var<T>& a) {
  T total{0};
  for (T x : a.values()) total += x;
  const std::size_t ia = a.id();
  return a.tape().record(Shape{}, {total}, {ia}, [ia](Tape<T>& tape, std::size_t self) {
    const T g = tape.grad(self)[0];
    for (T& v : tape.grad(ia)) v += g;
  });
}

template <typename T>
Var<T> mean(const Var<T>& a) {
  const std::size_t n = a.numel();
  if (n == 0) throw ContractError("mean of empty value");
  return scale(sum(a), T{1} / static_cast<T>(n));
}

template <typename T>
Var<T> matmul(const Var<T>& a, const Var<T>& b) {
  check_same_tape(a, b, "matmul");
  require_rank(a.shape(), 2, "matmul", "lhs");
  require_rank(b.shape(), 2, "matmul", "rhs");
  const std::size_t m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
  if (b.shape()[0] != k) {
    throw ShapeError("matmul: inner dimensions differ " + to_string(a.shape()) + " . " +
                     to_string(b.shape()));
  }
  std::vector<T> out(m * n);
  MapRM<T>(out.data(), m, n).noalias() =
      ConstMapRM<T>(a.values().data(), m, k) * ConstMapRM<T>(b.values().data(), k, n);
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(Shape{m, n}, std::move(out), {ia, ib},
                         [=](Tape<T>& tape, std::size_t self) {
                           ConstMapRM<T> g(tape.grad(self).data(), m, n);
                           if (tape.needs_grad(ia)) {
                             MapRM<T>(tape.grad(ia).data(), m, k).noalias() +=
                                 g * ConstMapRM<T>(tape.value(ib).data(), k, n).transpose();
                           }
                           if (tape.needs_grad(ib)) {
                             MapRM<T>(tape.grad(ib).data(), k, n).noalias() +=
                                 ConstMapRM<T>(tape.value(ia).data(), m, k).transpose() * g;
                           }
                         });
}

template <typename T>
Var<T> linear(const Var<T>& input, const Var<T>& weight, const Var<T>& bias) {
  check_same_tape(input, weight, "linear");
  check_same_tape(input, bias, "linear");
  require_rank(input.shape(), 2, "linear", "input");
  require_rank(weight.shape(), 2, "linear", "weight");
  const std::size_t batch = input.shape()[0], in = input.shape()[1], out_dim = weight.shape()[0];
  if (weight.shape()[1] != in) {
    throw ShapeError("linear: input " + to_string(input.shape()) + " does not match weight " +
                     to_string(weight.shape()));
  }
  if (bias.shape() != Shape{out_dim}) {
    throw ShapeError("linear: bias " + to_string(bias.shape()) + " does not match " +
                     std::to_string(out_dim) + " outputs");
  }
  std::vector<T> out(batch * out_dim);
  MapRM<T> y(out.data(), batch, out_dim);
  y.noalias() = ConstMapRM<T>(input.values().data(), batch, in) *
                ConstMapRM<T>(weight.values().data(), out_dim, in).transpose();
  Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>> bvec(bias.values().data(), out_dim);
  y.rowwise() += bvec;
  const std::size_t ix = input.id(), iw = weight.id(), ib = bias.id();
  return input.tape().record(
      Shape{batch, out_dim}, std::move(out), {ix, iw, ib}, [=](Tape<T>& tape, std::size_t self) {
        ConstMapRM<T> g(tape.grad(self).data(), batch, out_dim);
        if (tape.needs_grad(ix)) {
          MapRM<T>(tape.grad(ix).data(), batch, in).noalias() +=
              g * ConstMapRM<T>(tape.value(iw).data(), out_dim, in);
        }
        if (tape.needs_grad(iw)) {
          MapRM<T>(tape.grad(iw).data(), out_dim, in).noalias() +=
              g.transpose() * ConstMapRM<T>(tape.value(ix).data(), batch, in);
        }
        if (tape.needs_grad(ib)) {
          // Plain loops: Eigen's vectorised reductions pick their summation order from the
          // buffer address, which would make gradients differ between identical runs.
          auto gb = tape.grad(ib);
          for (std::size_t r = 0; r < batch; ++r)
            for (std::size_t o = 0; o < out_dim; ++o) gb[o] += g(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(o));
        }
      });
}

template <typename T>
Var<T> reshape(const Var<T>& a, Shape shape) {
  if (numel(shape) != a.numel()) {
    throw ShapeError("reshape: cannot view " + to_string(a.shape()) + " as " + to_string(shape));
  }
  auto v = a.values();
  const std::size_t ia = a.id();
  return a.tape().record(std::move(shape), std::vector<T>(v.begin(), v.end()), {ia},
                         [ia](Tape<T>& tape, std::size_t self) {
                           auto g = tape.grad(self);
                           auto ga = tape.grad(ia);
                           for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
                         });
}

template <typename T>
Var<T> concat_columns(const Var<T>& a, const Var<T>& b) {
  check_same_tape(a, b, "concat_columns");
  require_rank(a.shape(), 2, "concat_columns", "lhs");
  require_rank(b.shape(), 2, "concat_columns", "rhs");
  const std::size_t rows = a.shape()[0], na = a.shape()[1], nb = b.shape()[1];
  if (b.shape()[0] != rows) {
    throw ShapeError("concat_columns: row counts differ " + to_string(a.shape()) + " vs " +
                     to_string(b.shape()));
  }
  const std::size_t n = na + nb;
  std::vector<T> out(rows * n);
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy_n(av.begin() + r * na, na, out.begin() + r * n);
    std::copy_n(bv.begin() + r * nb, nb, out.begin() + r * n + na);
  }
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(Shape{rows, n}, std::move(out), {ia, ib},
                         [=](Tape<T>& tape, std::size_t self) {
                           auto g = tape.grad(self);
                           if (tape.needs_grad(ia)) {
                             auto ga = tape.grad(ia);
                             for (std::size_t r = 0; r < rows; ++r)
                               for (std::size_t j = 0; j < na; ++j) ga[r * na + j] += g[r * n + j];
                           }
                           if (tape.needs_grad(ib)) {
                             auto gb = tape.grad(ib);
                             for (std::size_t r = 0; r < rows; ++r)
                               for (std::size_t j = 0; j < nb; ++j)
                                 gb[r * nb + j] += g[r * n + na + j];
                           }
                         });
}

template <typename T>
Var<T> conv2d(const Var<T>& input, const Var<T>& weight, const Var<T>& bias, std::size_t stride,
              std::size_t padding) {
  check_same_tape(input, weight, "conv2d");
  check_same_tape(input, bias, "conv2d");
  require_rank(input.shape(), 4, "conv2d", "input");
  require_rank(weight.shape(), 4, "conv2d", "weight");
  const Shape& xs = input.shape();
  const Shape& ws = weight.shape();
  const std::size_t batch = xs[0], channels = xs[1], height = xs[2], width = xs[3];
  const std::size_t out_c = ws[0], k = ws[2];
  if (ws[1] != channels || ws[3] != k) {
    throw ShapeError("conv2d: weight " + to_string(ws) + " incompatible with input " + to_string(xs));
  }
  if (bias.shape() != Shape{out_c}) throw ShapeError("conv2d: bias shape " + to_string(bias.shape()));
  if (stride == 0 || height + 2 * padding < k || width + 2 * padding < k) {
    throw ShapeError("conv2d: kernel " + std::to_string(k) + " does not fit input " + to_string(xs));
  }
  const std::size_t out_h = (height + 2 * padding - k) / stride + 1;
  const std::size_t out_w = (width + 2 * padding - k) / stride + 1;
  const std::size_t patch = channels * k * k, positions = out_h * out_w;
  const std::size_t in_size = channels * height * width, out_size = out_c * positions;

  std::vector<T> out(batch * out_size);
  std::vector<T> col(patch * positions);
  ConstMapRM<T> w(weight.values().data(), out_c, patch);
  Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>> bvec(bias.values().data(), out_c);
  auto xv = input.values();
  for (std::size_t n = 0; n < batch; ++n) {
    im2col(xv.data() + n * in_size, channels, height, width, k, stride, padding, out_h, out_w,
           col.data());
    MapRM<T> y(out.data() + n * out_size, out_c, positions);
    y.noalias() = w * ConstMapRM<T>(col.data(), patch, positions);
    y.colwise() += bvec;
  }

  const std::size_t ix = input.id(), iw = weight.id(), ib = bias.id();
  return input.tape().record(
      Shape{batch, out_c, out_h, out_w}, std::move(out), {ix, iw, ib},
      [=](Tape<T>& tape, std::size_t self) {
        auto g = tape.grad(self);
        auto x = tape.value(ix);
        const bool need_x = tape.needs_grad(ix), need_w = tape.needs_grad(iw),
                   need_b = tape.needs_grad(ib);
        ConstMapRM<T> wmat(tape.value(iw).data(), out_c, patch);
        std::vector<T> colbuf(patch * positions);
        std::vector<T> dcol(need_x ? patch * positions : 0);
        for (std::size_t n = 0; n < batch; ++n) {
          ConstMapRM<T> gn(g.data() + n * out_size, out_c, positions);
          if (need_w) {
            im2col(x.data() + n * in_size, channels, height, width, k, stride, padding, out_h,
                   out_w, colbuf.data());
            MapRM<T>(tape.grad(iw).data(), out_c, patch).noalias() +=
                gn * ConstMapRM<T>(colbuf.data(), patch, positions).transpose();
          }
          if (need_b) {
            auto gb = tape.grad(ib);
            const T* row = g.data() + n * out_size;
            for (std::size_t o = 0; o < out_c; ++o) {
              T acc{0};
              for (std::size_t p = 0; p < positions; ++p) acc += row[o * positions + p];
              gb[o] += acc;
            }
          }
          if (need_x) {
            MapRM<T>(dcol.data(), patch, positions).noalias() = wmat.transpose() * gn;
            col2im(dcol.data(), channels, height, width, k, stride, padding, out_h, out_w,
                   tape.grad(ix).data() + n * in_size);
          }
        }
      });
}

template <typename T>
Var<T> conv_transpose2d(const Var<T>& input, const Var<T>& weight, const Var<T>& bias,
                        std::size_t stride, std::size_t padding, std::size_t output_padding) {
  check_same_tape(input, weight, "conv_transpose2d");
  check_same_tape(input, bias, "conv_transpose2d");
  require_rank(input.shape(), 4, "conv_transpose2d", "input");
  require_rank(weight.shape(), 4, "conv_transpose2d", "weight");
  const Shape& xs = input.shape();
  const Shape& ws = weight.shape();
  const std::size_t batch = xs[0], channels = xs[1], height = xs[2], width = xs[3];
  const std::size_t out_c = ws[1], k = ws[2];
  if (ws[0] != channels || ws[3] != k) {
    throw ShapeError("conv_transpose2d: weight " + to_string(ws) + " incompatible with input " +
                     to_string(xs));
  }
  if (bias.shape() != Shape{out_c}) {
    throw ShapeError("conv_transpose2d: bias shape " + to_string(bias.shape()));
  }
  if (stride == 0 || output_padding >= stride || height == 0 || width == 0 ||
      (height - 1) * stride + k + output_padding < 2 * padding + 1) {
    throw ShapeError("conv_transpose2d: invalid geometry for input " + to_string(xs));
  }
  const std::size_t out_h = (height - 1) * stride + k + output_padding - 2 * padding;
  const std::size_t out_w = (width - 1) * stride + k + output_padding - 2 * padding;
  const std::size_t patch = out_c * k * k, positions = height * width;
  const std::size_t in_size = channels * positions, out_size = out_c * out_h * out_w;

  std::vector<T> out(batch * out_size, T{0});
  std::vector<T> col(patch * positions);
  ConstMapRM<T> w(weight.values().data(), channels, patch);
  auto xv = input.values();
  auto bv = bias.values();
  for (std::size_t n = 0; n < batch; ++n) {
    MapRM<T>(col.data(), patch, positions).noalias() =
        w.transpose() * ConstMapRM<T>(xv.data() + n * in_size, channels, positions);
    T* y = out.data() + n * out_size;
    col2im(col.data(), out_c, out_h, out_w, k, stride, padding, height, width, y);
    for (std::size_t c = 0; c < out_c; ++c) {
      T* plane = y + c * out_h * out_w;
      for (std::size_t i = 0; i < out_h * out_w; ++i) plane[i] += bv[c];
    }
  }

  const std::size_t ix = input.id(), iw = weight.id(), ib = bias.id();
  return input.tape().record(
      Shape{batch, out_c, out_h, out_w}, std::move(out), {ix, iw, ib},
      [=](Tape<T>& tape, std::size_t self) {
        auto g = tape.grad(self);
        auto x = tape.value(ix);
        const bool need_x = tape.needs_grad(ix), need_w = tape.needs_grad(iw),
                   need_b = tape.needs_grad(ib);
        ConstMapRM<T> wmat(tape.value(iw).data(), channels, patch);
        std::vector<T> gcol(patch * positions);
        for (std::size_t n = 0; n < batch; ++n) {
          const T* gn = g.data() + n * out_size;
          if (need_b) {
            auto gb = tape.grad(ib);
            for (std::size_t c = 0; c < out_c; ++c) {
              const T* plane = gn + c * out_h * out_w;
              T acc{0};
              for (std::size_t i = 0; i < out_h * out_w; ++i) acc += plane[i];
              gb[c] += acc;
            }
          }
          if (!need_x && !need_w) continue;
          im2col(gn, out_c, out_h, out_w, k, stride, padding, height, width, gcol.data());
          ConstMapRM<T> gc(gcol.data(), patch, positions);
          if (need_x) {
            MapRM<T>(tape.grad(ix).data() + n * in_size, channels, positions).noalias() += wmat * gc;
          }
          if (need_w) {
            MapRM<T>(tape.grad(iw).data(), channels, patch).noalias() +=
                ConstMapRM<T>(x.data() + n * in_size, channels, positions) * gc.transpose();
          }
        }
      });
}

#define SSDAAE_INSTANTIATE_OPS(T)                                                              \
  template Var<T> add(const Var<T>&, const Var<T>&);                                           \
  template Var<T> sub(const Var<T>&, const Var<T>&);                                           \
  template Var<T> mul(const Var<T>&, const Var<T>&);                                           \
  template Var<T> negate(const Var<T>&);                                                       \
  template Var<T> exp(const Var<T>&);                                                          \
  template Var<T> log(const Var<T>&);                                                          \
  template Var<T> clamped_log(const Var<T>&);                                                  \
  template Var<T> scale(const Var<T>&, T);                                                     \
  template Var<T> add_scalar(const Var<T>&, T);                                                \
  template Var<T> relu(const Var<T>&);                                                         \
  template Var<T> sigmoid(const Var<T>&);                                                      \
  template Var<T> sum(const Var<T>&);                                                          \
  template Var<T> mean(const Var<T>&);                                                         \
  template Var<T> matmul(const Var<T>&, const Var<T>&);                                        \
  template Var<T> linear(const Var<T>&, const Var<T>&, const Var<T>&);                         \
  template Var<T> reshape(const Var<T>&, Shape);                                               \
  template Var<T> concat_columns(const Var<T>&, const Var<T>&);                                \
  template Var<T> conv2d(const Var<T>&, const Var<T>&, const Var<T>&, std::size_t, std::size_t); \
  template Var<T> conv_transpose2d(const Var<T>&, const Var<T>&, const Var<T>&, std::size_t,   \
                                   std::size_t, std::size_t);

SSDAAE_INSTANTIATE_OPS(float)
SSDAAE_INSTANTIATE_OPS(double)

#undef SSDAAE_INSTANTIATE_OPS

}  // namespace ssdaae
