#include "sslse/autodiff/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "sslse/error.hpp"
#include "sslse/parallel.hpp"

namespace sslse::ad {

namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMatMap = Eigen::Map<const RowMat<T>>;

// Samples per weight-gradient partial. Fixed so the reduction order is the
// same for any worker count.
constexpr std::size_t kGradChunk = 8;

template <typename T>
std::vector<T>& grad_of(Node<T>& n) {
  if (n.grad.empty()) n.grad.assign(n.value.size(), T{0});
  return n.grad;
}

template <typename T>
void require_same_shape(const Tensor<T>& a, const Tensor<T>& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw Error(Errc::ShapeMismatch, std::string(op) + ": " + shape_string(a.shape()) + " vs " +
                                         shape_string(b.shape()));
  }
}

template <typename T>
void require_rank(const Tensor<T>& t, std::size_t rank, const char* op, const char* what) {
  if (t.rank() != rank) {
    throw Error(Errc::ShapeMismatch, std::string(op) + ": " + what + " must have rank " + std::to_string(rank) +
                                         ", got " + shape_string(t.shape()));
  }
}

struct ConvGeom {
  std::size_t n, c, h, w, f, kh, kw, stride, pad, ho, wo;
  std::size_t ckk() const { return c * kh * kw; }
  std::size_t out_hw() const { return ho * wo; }
  bool is_pointwise() const { return kh == 1 && kw == 1 && stride == 1 && pad == 0; }
};

template <typename T>
void im2col(const T* x, const ConvGeom& g, T* col) {
  const std::size_t hw = g.out_hw();
  for (std::size_t c = 0; c < g.c; ++c) {
    for (std::size_t ki = 0; ki < g.kh; ++ki) {
      for (std::size_t kj = 0; kj < g.kw; ++kj) {
        T* row = col + ((c * g.kh + ki) * g.kw + kj) * hw;
        for (std::size_t oy = 0; oy < g.ho; ++oy) {
          const auto iy = static_cast<std::ptrdiff_t>(oy * g.stride + ki) - static_cast<std::ptrdiff_t>(g.pad);
          T* dst = row + oy * g.wo;
          if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(g.h)) {
            std::fill(dst, dst + g.wo, T{0});
            continue;
          }
          const T* src = x + (c * g.h + static_cast<std::size_t>(iy)) * g.w;
          for (std::size_t ox = 0; ox < g.wo; ++ox) {
            const auto ix = static_cast<std::ptrdiff_t>(ox * g.stride + kj) - static_cast<std::ptrdiff_t>(g.pad);
            dst[ox] = (ix < 0 || ix >= static_cast<std::ptrdiff_t>(g.w)) ? T{0} : src[ix];
          }
        }
      }
    }
  }
}

template <typename T>
void col2im_add(const T* col, const ConvGeom& g, T* dx) {
  const std::size_t hw = g.out_hw();
  for (std::size_t c = 0; c < g.c; ++c) {
    for (std::size_t ki = 0; ki < g.kh; ++ki) {
      for (std::size_t kj = 0; kj < g.kw; ++kj) {
        const T* row = col + ((c * g.kh + ki) * g.kw + kj) * hw;
        for (std::size_t oy = 0; oy < g.ho; ++oy) {
          const auto iy = static_cast<std::ptrdiff_t>(oy * g.stride + ki) - static_cast<std::ptrdiff_t>(g.pad);
          if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(g.h)) continue;
          T* dst = dx + (c * g.h + static_cast<std::size_t>(iy)) * g.w;
          const T* src = row + oy * g.wo;
          for (std::size_t ox = 0; ox < g.wo; ++ox) {
            const auto ix = static_cast<std::ptrdiff_t>(ox * g.stride + kj) - static_cast<std::ptrdiff_t>(g.pad);
            if (ix >= 0 && ix < static_cast<std::ptrdiff_t>(g.w)) dst[ix] += src[ox];
          }
        }
      }
    }
  }
}

}  // namespace

template <typename T>
Tensor<T> add(Tape<T>& tape, const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape(a, b, "add");
  Tensor<T> out(a.shape(), tape.wants({&a, &b}));
  auto av = a.data();
  auto bv = b.data();
  auto ov = out.data();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] + bv[i];
  if (out.requires_grad()) {
    tape.record(out, [an = a.node(), bn = b.node(), on = out.node()] {
      for (auto* in : {an.get(), bn.get()}) {
        if (!in->requires_grad) continue;
        auto& g = grad_of(*in);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += on->grad[i];
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> mul(Tape<T>& tape, const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape(a, b, "mul");
  Tensor<T> out(a.shape(), tape.wants({&a, &b}));
  auto av = a.data();
  auto bv = b.data();
  auto ov = out.data();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] * bv[i];
  if (out.requires_grad()) {
    tape.record(out, [an = a.node(), bn = b.node(), on = out.node()] {
      if (an->requires_grad) {
        auto& g = grad_of(*an);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += on->grad[i] * bn->value[i];
      }
      if (bn->requires_grad) {
        auto& g = grad_of(*bn);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += on->grad[i] * an->value[i];
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> sum(Tape<T>& tape, const Tensor<T>& x) {
  Tensor<T> out(Shape{1}, tape.wants({&x}));
  T acc{0};
  for (T v : x.data()) acc += v;
  out[0] = acc;
  if (out.requires_grad()) {
    tape.record(out, [xn = x.node(), on = out.node()] {
      auto& g = grad_of(*xn);
      for (auto& v : g) v += on->grad[0];
    });
  }
  return out;
}

template <typename T>
Tensor<T> concat(Tape<T>& tape, std::span<const Tensor<T>> parts) {
  if (parts.empty()) throw Error(Errc::ShapeMismatch, "concat: no inputs");
  Shape shape = parts[0].shape();
  if (shape.empty()) throw Error(Errc::ShapeMismatch, "concat: rank-0 input");
  std::size_t rows = 0;
  bool needs_grad = false;
  for (const auto& p : parts) {
    if (p.rank() != shape.size() || !std::equal(shape.begin() + 1, shape.end(), p.shape().begin() + 1)) {
      throw Error(Errc::ShapeMismatch,
                  "concat: " + shape_string(p.shape()) + " incompatible with " + shape_string(shape));
    }
    rows += p.dim(0);
    needs_grad = needs_grad || tape.wants({&p});
  }
  shape[0] = rows;
  Tensor<T> out(shape, needs_grad);
  std::size_t offset = 0;
  std::vector<std::shared_ptr<Node<T>>> nodes;
  for (const auto& p : parts) {
    std::copy(p.data().begin(), p.data().end(), out.data().begin() + static_cast<std::ptrdiff_t>(offset));
    offset += p.size();
    nodes.push_back(p.node());
  }
  if (out.requires_grad()) {
    tape.record(out, [nodes = std::move(nodes), on = out.node()] {
      std::size_t off = 0;
      for (const auto& n : nodes) {
        if (n->requires_grad) {
          auto& g = grad_of(*n);
          for (std::size_t i = 0; i < g.size(); ++i) g[i] += on->grad[off + i];
        }
        off += n->value.size();
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> relu(Tape<T>& tape, const Tensor<T>& x) {
  Tensor<T> out(x.shape(), tape.wants({&x}));
  auto xv = x.data();
  auto ov = out.data();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = xv[i] > T{0} ? xv[i] : T{0};
  if (out.requires_grad()) {
    tape.record(out, [xn = x.node(), on = out.node()] {
      auto& g = grad_of(*xn);
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (xn->value[i] > T{0}) g[i] += on->grad[i];
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> sigmoid(Tape<T>& tape, const Tensor<T>& x) {
  Tensor<T> out(x.shape(), tape.wants({&x}));
  auto xv = x.data();
  auto ov = out.data();
  for (std::size_t i = 0; i < ov.size(); ++i) {
    const T v = xv[i];
    if (v >= T{0}) {
      ov[i] = T{1} / (T{1} + std::exp(-v));
    } else {
      const T e = std::exp(v);
      ov[i] = e / (T{1} + e);
    }
  }
  if (out.requires_grad()) {
    tape.record(out, [xn = x.node(), on = out.node()] {
      auto& g = grad_of(*xn);
      for (std::size_t i = 0; i < g.size(); ++i) {
        const T y = on->value[i];
        g[i] += on->grad[i] * y * (T{1} - y);
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> dense(Tape<T>& tape, const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b) {
  require_rank(x, 2, "dense", "input");
  require_rank(w, 2, "dense", "weight");
  require_rank(b, 1, "dense", "bias");
  const std::size_t n = x.dim(0), d = x.dim(1), k = w.dim(1);
  if (w.dim(0) != d || b.dim(0) != k) {
    throw Error(Errc::ShapeMismatch, "dense: input " + shape_string(x.shape()) + ", weight " +
                                         shape_string(w.shape()) + ", bias " + shape_string(b.shape()));
  }
  Tensor<T> out(Shape{n, k}, tape.wants({&x, &w, &b}));
  {
    ConstMatMap<T> xm(x.data().data(), n, d);
    ConstMatMap<T> wm(w.data().data(), d, k);
    MatMap<T> om(out.data().data(), n, k);
    om.noalias() = xm * wm;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < k; ++c) om(r, c) += b[c];
  }
  if (out.requires_grad()) {
    tape.record(out, [xn = x.node(), wn = w.node(), bn = b.node(), on = out.node(), n, d, k] {
      ConstMatMap<T> dout(on->grad.data(), n, k);
      if (xn->requires_grad) {
        MatMap<T> dx(grad_of(*xn).data(), n, d);
        dx.noalias() += dout * ConstMatMap<T>(wn->value.data(), d, k).transpose();
      }
      if (wn->requires_grad) {
        MatMap<T> dw(grad_of(*wn).data(), d, k);
        dw.noalias() += ConstMatMap<T>(xn->value.data(), n, d).transpose() * dout;
      }
      if (bn->requires_grad) {
        auto& db = grad_of(*bn);
        for (std::size_t r = 0; r < n; ++r)
          for (std::size_t c = 0; c < k; ++c) db[c] += dout(r, c);
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> conv2d(Tape<T>& tape, const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b,
                 Conv2dOptions options) {
  require_rank(x, 4, "conv2d", "input");
  require_rank(w, 4, "conv2d", "weight");
  require_rank(b, 1, "conv2d", "bias");
  if (options.stride == 0) throw Error(Errc::ShapeMismatch, "conv2d: stride must be >= 1");
  ConvGeom g{};
  g.n = x.dim(0);
  g.c = x.dim(1);
  g.h = x.dim(2);
  g.w = x.dim(3);
  g.f = w.dim(0);
  g.kh = w.dim(2);
  g.kw = w.dim(3);
  g.stride = options.stride;
  g.pad = options.padding;
  if (w.dim(1) != g.c || b.dim(0) != g.f) {
    throw Error(Errc::ShapeMismatch, "conv2d: input " + shape_string(x.shape()) + ", weight " +
                                         shape_string(w.shape()) + ", bias " + shape_string(b.shape()));
  }
  const std::size_t padded_h = g.h + 2 * g.pad, padded_w = g.w + 2 * g.pad;
  if (padded_h < g.kh || padded_w < g.kw) {
    throw Error(Errc::ShapeMismatch, "conv2d: kernel larger than padded input");
  }
  if ((padded_h - g.kh) % g.stride != 0 || (padded_w - g.kw) % g.stride != 0) {
    throw Error(Errc::NonIntegralOutput, "conv2d: input " + shape_string(x.shape()) + " with kernel " +
                                             std::to_string(g.kh) + "x" + std::to_string(g.kw) + ", stride " +
                                             std::to_string(g.stride) + ", padding " + std::to_string(g.pad));
  }
  g.ho = (padded_h - g.kh) / g.stride + 1;
  g.wo = (padded_w - g.kw) / g.stride + 1;

  Tensor<T> out(Shape{g.n, g.f, g.ho, g.wo}, tape.wants({&x, &w, &b}));
  const std::size_t in_stride = g.c * g.h * g.w;
  const std::size_t out_stride = g.f * g.out_hw();
  {
    const T* xp = x.data().data();
    const T* wp = w.data().data();
    const T* bp = b.data().data();
    T* op = out.data().data();
    parallel_for(g.n, [&](std::size_t n) {
      std::vector<T> col;
      const T* colp = xp + n * in_stride;
      if (!g.is_pointwise()) {
        col.resize(g.ckk() * g.out_hw());
        im2col(xp + n * in_stride, g, col.data());
        colp = col.data();
      }
      MatMap<T> om(op + n * out_stride, g.f, g.out_hw());
      om.noalias() = ConstMatMap<T>(wp, g.f, g.ckk()) * ConstMatMap<T>(colp, g.ckk(), g.out_hw());
      for (std::size_t f = 0; f < g.f; ++f) om.row(f).array() += bp[f];
    });
  }

  if (out.requires_grad()) {
    tape.record(out, [xn = x.node(), wn = w.node(), bn = b.node(), on = out.node(), g, in_stride, out_stride] {
      const T* dout = on->grad.data();
      if (bn->requires_grad) {
        auto& db = grad_of(*bn);
        for (std::size_t n = 0; n < g.n; ++n) {
          for (std::size_t f = 0; f < g.f; ++f) {
            const T* row = dout + n * out_stride + f * g.out_hw();
            T acc{0};
            for (std::size_t i = 0; i < g.out_hw(); ++i) acc += row[i];
            db[f] += acc;
          }
        }
      }
      const bool want_w = wn->requires_grad;
      const bool want_x = xn->requires_grad;
      if (!want_w && !want_x) return;
      const std::size_t wsize = g.f * g.ckk();
      const std::size_t chunks = (g.n + kGradChunk - 1) / kGradChunk;
      std::vector<T> partials(want_w ? chunks * wsize : 0, T{0});
      T* dxp = want_x ? grad_of(*xn).data() : nullptr;
      const T* xp = xn->value.data();
      const T* wp = wn->value.data();
      parallel_for(chunks, [&](std::size_t chunk) {
        std::vector<T> col;
        std::vector<T> dcol;
        if (!g.is_pointwise()) {
          col.resize(g.ckk() * g.out_hw());
          dcol.resize(g.ckk() * g.out_hw());
        }
        const std::size_t end = std::min(g.n, (chunk + 1) * kGradChunk);
        for (std::size_t n = chunk * kGradChunk; n < end; ++n) {
          ConstMatMap<T> dom(dout + n * out_stride, g.f, g.out_hw());
          if (want_w) {
            const T* colp = xp + n * in_stride;
            if (!g.is_pointwise()) {
              im2col(xp + n * in_stride, g, col.data());
              colp = col.data();
            }
            MatMap<T> pm(partials.data() + chunk * wsize, g.f, g.ckk());
            pm.noalias() += dom * ConstMatMap<T>(colp, g.ckk(), g.out_hw()).transpose();
          }
          if (want_x) {
            ConstMatMap<T> wm(wp, g.f, g.ckk());
            if (g.is_pointwise()) {
              MatMap<T> dxm(dxp + n * in_stride, g.ckk(), g.out_hw());
              dxm.noalias() += wm.transpose() * dom;
            } else {
              MatMap<T> dcm(dcol.data(), g.ckk(), g.out_hw());
              dcm.noalias() = wm.transpose() * dom;
              col2im_add(dcol.data(), g, dxp + n * in_stride);
            }
          }
        }
      });
      if (want_w) {
        auto& dw = grad_of(*wn);
        for (std::size_t chunk = 0; chunk < chunks; ++chunk) {
          const T* p = partials.data() + chunk * wsize;
          for (std::size_t i = 0; i < wsize; ++i) dw[i] += p[i];
        }
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> global_avg_pool(Tape<T>& tape, const Tensor<T>& x) {
  require_rank(x, 4, "global_avg_pool", "input");
  const std::size_t n = x.dim(0), c = x.dim(1), hw = x.dim(2) * x.dim(3);
  if (hw == 0) throw Error(Errc::ShapeMismatch, "global_avg_pool: empty spatial extent");
  Tensor<T> out(Shape{n, c}, tape.wants({&x}));
  const T inv = T{1} / static_cast<T>(hw);
  for (std::size_t i = 0; i < n * c; ++i) {
    const T* p = x.data().data() + i * hw;
    T acc{0};
    for (std::size_t j = 0; j < hw; ++j) acc += p[j];
    out[i] = acc * inv;
  }
  if (out.requires_grad()) {
    tape.record(out, [xn = x.node(), on = out.node(), n, c, hw, inv] {
      auto& g = grad_of(*xn);
      for (std::size_t i = 0; i < n * c; ++i) {
        const T v = on->grad[i] * inv;
        for (std::size_t j = 0; j < hw; ++j) g[i * hw + j] += v;
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> l2_normalize(Tape<T>& tape, const Tensor<T>& x) {
  require_rank(x, 2, "l2_normalize", "input");
  const std::size_t n = x.dim(0), d = x.dim(1);
  Tensor<T> out(x.shape(), tape.wants({&x}));
  std::vector<T> norms(n);
  for (std::size_t r = 0; r < n; ++r) {
    const T* row = x.data().data() + r * d;
    T sq{0};
    for (std::size_t j = 0; j < d; ++j) sq += row[j] * row[j];
    const T norm = std::sqrt(sq);
    if (!(norm > T{1e-12})) {
      throw Error(Errc::DegenerateNorm, "l2_normalize: row " + std::to_string(r) + " has norm <= 1e-12");
    }
    norms[r] = norm;
    for (std::size_t j = 0; j < d; ++j) out[r * d + j] = row[j] / norm;
  }
  if (out.requires_grad()) {
    tape.record(out, [xn = x.node(), on = out.node(), norms = std::move(norms), n, d] {
      auto& g = grad_of(*xn);
      for (std::size_t r = 0; r < n; ++r) {
        const T* y = on->value.data() + r * d;
        const T* dy = on->grad.data() + r * d;
        T dot{0};
        for (std::size_t j = 0; j < d; ++j) dot += y[j] * dy[j];
        for (std::size_t j = 0; j < d; ++j) g[r * d + j] += (dy[j] - y[j] * dot) / norms[r];
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> softmax_cross_entropy(Tape<T>& tape, const Tensor<T>& logits, std::span<const int> labels) {
  require_rank(logits, 2, "softmax_cross_entropy", "logits");
  const std::size_t n = logits.dim(0), k = logits.dim(1);
  if (labels.size() != n || n == 0) {
    throw Error(Errc::ShapeMismatch, "softmax_cross_entropy: " + std::to_string(labels.size()) +
                                         " labels for logits " + shape_string(logits.shape()));
  }
  for (int label : labels) {
    if (label < 0 || static_cast<std::size_t>(label) >= k) {
      throw Error(Errc::LabelOutOfRange, "softmax_cross_entropy: label " + std::to_string(label) +
                                             " outside [0, " + std::to_string(k) + ")");
    }
  }
  Tensor<T> out(Shape{1}, tape.wants({&logits}));
  std::vector<T> probs(n * k);
  T total{0};
  for (std::size_t r = 0; r < n; ++r) {
    const T* row = logits.data().data() + r * k;
    const T mx = *std::max_element(row, row + k);
    T se{0};
    for (std::size_t j = 0; j < k; ++j) {
      probs[r * k + j] = std::exp(row[j] - mx);
      se += probs[r * k + j];
    }
    for (std::size_t j = 0; j < k; ++j) probs[r * k + j] /= se;
    total += (mx + std::log(se)) - row[static_cast<std::size_t>(labels[r])];
  }
  out[0] = total / static_cast<T>(n);
  if (out.requires_grad()) {
    tape.record(out, [ln = logits.node(), on = out.node(), probs = std::move(probs),
                      labels = std::vector<int>(labels.begin(), labels.end()), n, k] {
      auto& g = grad_of(*ln);
      const T scale = on->grad[0] / static_cast<T>(n);
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t j = 0; j < k; ++j) {
          const T onehot = static_cast<std::size_t>(labels[r]) == j ? T{1} : T{0};
          g[r * k + j] += scale * (probs[r * k + j] - onehot);
        }
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> scale_channels(Tape<T>& tape, const Tensor<T>& x, const Tensor<T>& g) {
  require_rank(x, 4, "scale_channels", "input");
  require_rank(g, 2, "scale_channels", "gate");
  const std::size_t n = x.dim(0), c = x.dim(1), hw = x.dim(2) * x.dim(3);
  if (g.dim(0) != n || g.dim(1) != c) {
    throw Error(Errc::ShapeMismatch,
                "scale_channels: input " + shape_string(x.shape()) + ", gate " + shape_string(g.shape()));
  }
  Tensor<T> out(x.shape(), tape.wants({&x, &g}));
  for (std::size_t i = 0; i < n * c; ++i) {
    const T s = g[i];
    const T* src = x.data().data() + i * hw;
    T* dst = out.data().data() + i * hw;
    for (std::size_t j = 0; j < hw; ++j) dst[j] = src[j] * s;
  }
  if (out.requires_grad()) {
    tape.record(out, [xn = x.node(), gn = g.node(), on = out.node(), n, c, hw] {
      if (xn->requires_grad) {
        auto& dx = grad_of(*xn);
        for (std::size_t i = 0; i < n * c; ++i) {
          const T s = gn->value[i];
          for (std::size_t j = 0; j < hw; ++j) dx[i * hw + j] += on->grad[i * hw + j] * s;
        }
      }
      if (gn->requires_grad) {
        auto& dg = grad_of(*gn);
        for (std::size_t i = 0; i < n * c; ++i) {
          T acc{0};
          for (std::size_t j = 0; j < hw; ++j) acc += on->grad[i * hw + j] * xn->value[i * hw + j];
          dg[i] += acc;
        }
      }
    });
  }
  return out;
}

#define SSLSE_INSTANTIATE_OPS(T)                                                                  \
  template Tensor<T> add(Tape<T>&, const Tensor<T>&, const Tensor<T>&);                           \
  template Tensor<T> mul(Tape<T>&, const Tensor<T>&, const Tensor<T>&);                           \
  template Tensor<T> sum(Tape<T>&, const Tensor<T>&);                                             \
  template Tensor<T> concat(Tape<T>&, std::span<const Tensor<T>>);                                \
  template Tensor<T> relu(Tape<T>&, const Tensor<T>&);                                            \
  template Tensor<T> sigmoid(Tape<T>&, const Tensor<T>&);                                         \
  template Tensor<T> dense(Tape<T>&, const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);       \
  template Tensor<T> conv2d(Tape<T>&, const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,       \
                            Conv2dOptions);                                                       \
  template Tensor<T> global_avg_pool(Tape<T>&, const Tensor<T>&);                                 \
  template Tensor<T> l2_normalize(Tape<T>&, const Tensor<T>&);                                    \
  template Tensor<T> softmax_cross_entropy(Tape<T>&, const Tensor<T>&, std::span<const int>);     \
  template Tensor<T> scale_channels(Tape<T>&, const Tensor<T>&, const Tensor<T>&);

SSLSE_INSTANTIATE_OPS(float)
SSLSE_INSTANTIATE_OPS(double)

#undef SSLSE_INSTANTIATE_OPS

}  // namespace sslse::ad
