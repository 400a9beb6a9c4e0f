#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <vector>

#include "core/error.hpp"
#include "core/tensor.hpp"

namespace xmodal {

template <typename T>
using EigenMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<EigenMat<T>>;
template <typename T>
using CMatMap = Eigen::Map<const EigenMat<T>>;

struct ConvSpec {
    int in_h = 0, in_w = 0, in_c = 0;
    int out_c = 0;
    int k = 3, stride = 1, pad = 0, out_pad = 0;
    int out_h = 0, out_w = 0;
};

// Reverse-mode tape over dense tensor ops. Construction is eager: every op
// computes its value immediately, so data-dependent control flow (greedy
// decoding loops) can read intermediate values while the graph is built.
// backward() walks the tape in reverse construction order.
template <typename T>
class GraphT {
public:
    using Id = int32_t;

    GraphT() { nodes_.reserve(1024); }

    // --- leaves ---------------------------------------------------------
    Id leaf(TensorT<T> v) {
        const bool track = v.requires_grad;
        Id id = push(Op::kLeaf, std::move(v), -1, -1, track);
        return id;
    }
    Id param(ParamT<T>& p) {
        Id id = push(Op::kLeaf, p.value, -1, -1, true);
        nodes_[id].sink = &p;
        return id;
    }
    Id scalar(T v) { return leaf(TensorT<T>::scalar(v)); }

    // --- arithmetic -----------------------------------------------------
    Id matmul(Id a, Id b) {
        const auto& A = val(a);
        const auto& B = val(b);
        if (A.cols() != B.rows())
            throw DimensionError("matmul: inner dimensions disagree " + shape_str(A.shape) +
                                 " x " + shape_str(B.shape));
        TensorT<T> out(Shape{A.rows(), B.cols()});
        mat(out) = cmat(A) * cmat(B);
        return push(Op::kMatmul, std::move(out), a, b);
    }

    Id add(Id a, Id b) {
        const auto& A = val(a);
        const auto& B = val(b);
        if (!A.same_shape(B))
            throw DimensionError("add: shape mismatch " + shape_str(A.shape) + " vs " +
                                 shape_str(B.shape));
        TensorT<T> out = A;
        for (int64_t i = 0; i < out.numel(); ++i) out[i] += B[i];
        return push(Op::kAdd, std::move(out), a, b);
    }

    // y[r,c] = a[r,c] + bias[c]
    Id add_bias(Id a, Id bias) {
        const auto& A = val(a);
        const auto& B = val(bias);
        if (B.numel() != A.cols())
            throw DimensionError("add_bias: bias length " + std::to_string(B.numel()) +
                                 " vs cols " + std::to_string(A.cols()));
        TensorT<T> out = A;
        const int r = A.rows(), c = A.cols();
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) out.data[static_cast<size_t>(i) * c + j] += B[j];
        return push(Op::kAddBias, std::move(out), a, bias);
    }

    Id mul(Id a, Id b) {
        const auto& A = val(a);
        const auto& B = val(b);
        if (!A.same_shape(B))
            throw DimensionError("mul: shape mismatch " + shape_str(A.shape) + " vs " +
                                 shape_str(B.shape));
        TensorT<T> out = A;
        for (int64_t i = 0; i < out.numel(); ++i) out[i] *= B[i];
        return push(Op::kMul, std::move(out), a, b);
    }

    // y = c0 * a + c1, elementwise
    Id affine(Id a, T c0, T c1) {
        TensorT<T> out = val(a);
        for (auto& x : out.data) x = c0 * x + c1;
        Id id = push(Op::kAffine, std::move(out), a, -1);
        nodes_[id].c0 = c0;
        return id;
    }
    Id scale(Id a, T s) { return affine(a, s, T(0)); }

    // --- activations ----------------------------------------------------
    Id relu(Id a) {
        TensorT<T> out = val(a);
        for (auto& x : out.data) x = x > T(0) ? x : T(0);
        return push(Op::kRelu, std::move(out), a, -1);
    }
    Id tanh(Id a) {
        TensorT<T> out = val(a);
        for (auto& x : out.data) x = std::tanh(x);
        return push(Op::kTanh, std::move(out), a, -1);
    }
    Id sigmoid(Id a) {
        TensorT<T> out = val(a);
        for (auto& x : out.data) x = T(1) / (T(1) + std::exp(-x));
        return push(Op::kSigmoid, std::move(out), a, -1);
    }

    // Row-wise softmax over the first valid_cols columns (-1 = all columns).
    // Masked-out columns get probability zero, matching -inf pre-softmax logits.
    Id softmax_rows(Id a, int valid_cols = -1) {
        const auto& A = val(a);
        if (A.rank() != 2) throw DimensionError("softmax_rows: rank-2 tensor required");
        const int r = A.rows(), c = A.cols();
        const int vc = valid_cols < 0 ? c : valid_cols;
        if (vc <= 0 || vc > c) throw DimensionError("softmax_rows: invalid axis extent");
        TensorT<T> out(A.shape);
        for (int i = 0; i < r; ++i) {
            const T* x = A.data.data() + static_cast<size_t>(i) * c;
            T* y = out.data.data() + static_cast<size_t>(i) * c;
            T mx = x[0];
            for (int j = 1; j < vc; ++j) mx = std::max(mx, x[j]);
            T z = T(0);
            for (int j = 0; j < vc; ++j) {
                y[j] = std::exp(x[j] - mx);
                z += y[j];
            }
            for (int j = 0; j < vc; ++j) y[j] /= z;
            for (int j = vc; j < c; ++j) y[j] = T(0);
        }
        Id id = push(Op::kSoftmaxRows, std::move(out), a, -1);
        nodes_[id].i0 = vc;
        return id;
    }

    Id transpose(Id a) {
        const auto& A = val(a);
        if (A.rank() != 2) throw DimensionError("transpose: rank-2 tensor required");
        TensorT<T> out(Shape{A.cols(), A.rows()});
        mat(out) = cmat(A).transpose();
        return push(Op::kTranspose, std::move(out), a, -1);
    }

    // --- shape ops ------------------------------------------------------
    Id concat_cols(const std::vector<Id>& parts) {
        if (parts.empty()) throw DimensionError("concat_cols: empty list");
        int r = val(parts[0]).rows(), c = 0;
        for (Id p : parts) {
            if (val(p).rows() != r) throw DimensionError("concat_cols: row mismatch");
            c += val(p).cols();
        }
        TensorT<T> out(Shape{r, c});
        int off = 0;
        for (Id p : parts) {
            const auto& P = val(p);
            const int pc = P.cols();
            for (int i = 0; i < r; ++i)
                std::copy_n(P.data.data() + static_cast<size_t>(i) * pc, pc,
                            out.data.data() + static_cast<size_t>(i) * c + off);
            off += pc;
        }
        Id id = push(Op::kConcatCols, std::move(out), -1, -1);
        nodes_[id].plist.assign(parts.begin(), parts.end());
        refresh_needs(id);
        return id;
    }
    Id concat_cols(Id a, Id b) { return concat_cols(std::vector<Id>{a, b}); }

    Id concat_rows(const std::vector<Id>& parts) {
        if (parts.empty()) throw DimensionError("concat_rows: empty list");
        int c = val(parts[0]).cols(), r = 0;
        for (Id p : parts) {
            if (val(p).cols() != c) throw DimensionError("concat_rows: column mismatch");
            r += val(p).rows();
        }
        TensorT<T> out(Shape{r, c});
        size_t off = 0;
        for (Id p : parts) {
            const auto& P = val(p);
            std::copy(P.data.begin(), P.data.end(), out.data.begin() + off);
            off += P.data.size();
        }
        Id id = push(Op::kConcatRows, std::move(out), -1, -1);
        nodes_[id].plist.assign(parts.begin(), parts.end());
        refresh_needs(id);
        return id;
    }

    Id slice_cols(Id a, int c0, int c1) {
        const auto& A = val(a);
        if (c0 < 0 || c1 > A.cols() || c0 >= c1) throw DimensionError("slice_cols: bad range");
        const int r = A.rows(), c = A.cols(), w = c1 - c0;
        TensorT<T> out(Shape{r, w});
        for (int i = 0; i < r; ++i)
            std::copy_n(A.data.data() + static_cast<size_t>(i) * c + c0, w,
                        out.data.data() + static_cast<size_t>(i) * w);
        Id id = push(Op::kSliceCols, std::move(out), a, -1);
        nodes_[id].i0 = c0;
        nodes_[id].i1 = c1;
        return id;
    }

    Id slice_rows(Id a, int r0, int r1) {
        const auto& A = val(a);
        if (r0 < 0 || r1 > A.rows() || r0 >= r1) throw DimensionError("slice_rows: bad range");
        const int c = A.cols();
        TensorT<T> out(Shape{r1 - r0, c});
        std::copy_n(A.data.data() + static_cast<size_t>(r0) * c,
                    static_cast<size_t>(r1 - r0) * c, out.data.data());
        Id id = push(Op::kSliceRows, std::move(out), a, -1);
        nodes_[id].i0 = r0;
        nodes_[id].i1 = r1;
        return id;
    }

    Id reshape(Id a, Shape s) {
        const auto& A = val(a);
        if (shape_numel(s) != A.numel()) throw DimensionError("reshape: element count mismatch");
        TensorT<T> out;
        out.shape = std::move(s);
        out.data = A.data;
        return push(Op::kReshape, std::move(out), a, -1);
    }

    // --- reductions -----------------------------------------------------
    Id mean_rows(Id a) {
        const auto& A = val(a);
        if (A.rank() != 2 || A.rows() == 0) throw DimensionError("mean_rows: nonempty rank-2 required");
        const int r = A.rows(), c = A.cols();
        TensorT<T> out(Shape{1, c});
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) out[j] += A(i, j);
        for (int j = 0; j < c; ++j) out[j] /= static_cast<T>(r);
        return push(Op::kMeanRows, std::move(out), a, -1);
    }

    Id sum(Id a) {
        const auto& A = val(a);
        T s = T(0);
        for (T x : A.data) s += x;
        return push(Op::kSum, TensorT<T>::scalar(s), a, -1);
    }

    // Mean over rows of the softmax cross entropy between one-hot targets and
    // softmax(logits). Stable fused form; targets are data, never differentiated.
    Id softmax_ce_rows(Id logits, Id targets) {
        const auto& L = val(logits);
        const auto& Y = val(targets);
        if (!L.same_shape(Y)) throw DimensionError("softmax_ce_rows: shape mismatch");
        const int r = L.rows(), c = L.cols();
        TensorT<T> probs(L.shape);
        T loss = T(0);
        for (int i = 0; i < r; ++i) {
            const T* x = L.data.data() + static_cast<size_t>(i) * c;
            T* p = probs.data.data() + static_cast<size_t>(i) * c;
            T mx = x[0];
            for (int j = 1; j < c; ++j) mx = std::max(mx, x[j]);
            T z = T(0);
            for (int j = 0; j < c; ++j) {
                p[j] = std::exp(x[j] - mx);
                z += p[j];
            }
            const T logz = std::log(z);
            for (int j = 0; j < c; ++j) {
                p[j] /= z;
                const T t = Y.data[static_cast<size_t>(i) * c + j];
                if (t != T(0)) loss -= t * (x[j] - mx - logz);
            }
        }
        loss /= static_cast<T>(r);
        Id id = push(Op::kSoftmaxCeRows, TensorT<T>::scalar(loss), logits, targets);
        nodes_[id].aux = std::move(probs.data);
        return id;
    }

    // Mean over all elements of (a-b)^2.
    Id mse_mean(Id a, Id b) {
        const auto& A = val(a);
        const auto& B = val(b);
        if (!A.same_shape(B)) throw DimensionError("mse_mean: shape mismatch");
        T s = T(0);
        for (int64_t i = 0; i < A.numel(); ++i) {
            const T d = A[i] - B[i];
            s += d * d;
        }
        return push(Op::kMseMean, TensorT<T>::scalar(s / static_cast<T>(A.numel())), a, b);
    }

    // Mean over rows of the squared L2 row difference: (1/R) sum_r ||a_r - b_r||^2.
    Id mse_rowsum_mean(Id a, Id b) {
        const auto& A = val(a);
        const auto& B = val(b);
        if (!A.same_shape(B)) throw DimensionError("mse_rowsum_mean: shape mismatch");
        T s = T(0);
        for (int64_t i = 0; i < A.numel(); ++i) {
            const T d = A[i] - B[i];
            s += d * d;
        }
        return push(Op::kMseRowSumMean, TensorT<T>::scalar(s / static_cast<T>(A.rows())), a, b);
    }

    // --- convolution ----------------------------------------------------
    // x: [B, H, W, Cin], w: [k*k*Cin, Cout], bias: [Cout] -> [B, Ho, Wo, Cout]
    Id conv2d(Id x, Id w, Id bias, int k, int stride, int pad) {
        const auto& X = val(x);
        if (X.rank() != 4) throw DimensionError("conv2d: input must be [B,H,W,C]");
        ConvSpec cs;
        cs.in_h = X.shape[1];
        cs.in_w = X.shape[2];
        cs.in_c = X.shape[3];
        cs.k = k;
        cs.stride = stride;
        cs.pad = pad;
        cs.out_h = (cs.in_h + 2 * pad - k) / stride + 1;
        cs.out_w = (cs.in_w + 2 * pad - k) / stride + 1;
        const auto& W = val(w);
        if (W.rows() != k * k * cs.in_c) throw DimensionError("conv2d: kernel rows mismatch");
        cs.out_c = W.cols();
        if (val(bias).numel() != cs.out_c) throw DimensionError("conv2d: bias size mismatch");

        const int bsz = X.shape[0];
        const int grid = cs.out_h * cs.out_w;
        const int patch = k * k * cs.in_c;
        std::vector<T> cols(static_cast<size_t>(bsz) * grid * patch);
        TensorT<T> out(Shape{bsz, cs.out_h, cs.out_w, cs.out_c});
        for (int b = 0; b < bsz; ++b) {
            T* cb = cols.data() + static_cast<size_t>(b) * grid * patch;
            im2col(X.data.data() + static_cast<size_t>(b) * cs.in_h * cs.in_w * cs.in_c, cb,
                   cs.in_h, cs.in_w, cs.in_c, k, stride, pad, cs.out_h, cs.out_w);
            MatMap<T> yb(out.data.data() + static_cast<size_t>(b) * grid * cs.out_c, grid,
                         cs.out_c);
            yb = CMatMap<T>(cb, grid, patch) * cmat(W);
        }
        const auto& Bv = val(bias);
        for (int64_t i = 0; i < out.numel(); ++i) out[i] += Bv[i % cs.out_c];
        Id id = push(Op::kConv2d, std::move(out), x, w);
        nodes_[id].p2 = bias;
        nodes_[id].conv = cs;
        nodes_[id].aux = std::move(cols);
        return id;
    }

    // Transposed convolution (stride-s upsampling), the adjoint of conv2d.
    // x: [B, H, W, Cin], w: [Cin, k*k*Cout] -> [B, (H-1)s-2p+k+op, ..., Cout]
    Id conv2d_transpose(Id x, Id w, Id bias, int k, int stride, int pad, int out_pad) {
        const auto& X = val(x);
        if (X.rank() != 4) throw DimensionError("conv2d_transpose: input must be [B,H,W,C]");
        ConvSpec cs;
        cs.in_h = X.shape[1];
        cs.in_w = X.shape[2];
        cs.in_c = X.shape[3];
        cs.k = k;
        cs.stride = stride;
        cs.pad = pad;
        cs.out_pad = out_pad;
        cs.out_h = (cs.in_h - 1) * stride - 2 * pad + k + out_pad;
        cs.out_w = (cs.in_w - 1) * stride - 2 * pad + k + out_pad;
        const auto& W = val(w);
        if (W.rows() != cs.in_c) throw DimensionError("conv2d_transpose: kernel rows mismatch");
        if (W.cols() % (k * k) != 0) throw DimensionError("conv2d_transpose: kernel cols mismatch");
        cs.out_c = W.cols() / (k * k);
        if (val(bias).numel() != cs.out_c) throw DimensionError("conv2d_transpose: bias size");

        const int bsz = X.shape[0];
        const int grid = cs.in_h * cs.in_w;
        const int patch = k * k * cs.out_c;
        TensorT<T> out(Shape{bsz, cs.out_h, cs.out_w, cs.out_c});
        std::vector<T> cols(static_cast<size_t>(grid) * patch);
        for (int b = 0; b < bsz; ++b) {
            CMatMap<T> xb(X.data.data() + static_cast<size_t>(b) * grid * cs.in_c, grid, cs.in_c);
            MatMap<T>(cols.data(), grid, patch) = xb * cmat(W);
            col2im(cols.data(), out.data.data() + static_cast<size_t>(b) * cs.out_h * cs.out_w * cs.out_c,
                   cs.out_h, cs.out_w, cs.out_c, k, stride, pad, cs.in_h, cs.in_w);
        }
        const auto& Bv = val(bias);
        for (int64_t i = 0; i < out.numel(); ++i) out[i] += Bv[i % cs.out_c];
        Id id = push(Op::kConvT2d, std::move(out), x, w);
        nodes_[id].p2 = bias;
        nodes_[id].conv = cs;
        return id;
    }

    // --- access ---------------------------------------------------------
    const TensorT<T>& val(Id id) const { return node(id).value; }
    const TensorT<T>& grad_of(Id id) const {
        const auto& n = node(id);
        if (n.grad.empty()) throw UsageError("grad_of: node has no gradient");
        return n.grad;
    }
    size_t size() const { return nodes_.size(); }

    // --- reverse pass ---------------------------------------------------
    void backward(Id root) {
        auto& rn = node_mut(root);
        if (rn.value.numel() != 1)
            throw UsageError("backward: loss must be scalar, got " + shape_str(rn.value.shape));
        ensure_grad(root).data[0] = T(1);
        for (Id i = root; i >= 0; --i) {
            Node& n = nodes_[i];
            if (!n.needs || n.grad.empty()) continue;
            dispatch_backward(n);
            if (n.sink) {
                auto& g = n.sink->grad;
                for (int64_t j = 0; j < g.numel(); ++j) g[j] += n.grad[j];
            }
        }
    }

    void reset() { nodes_.clear(); }

private:
    enum class Op : uint8_t {
        kLeaf,
        kMatmul,
        kAdd,
        kAddBias,
        kMul,
        kAffine,
        kRelu,
        kTanh,
        kSigmoid,
        kSoftmaxRows,
        kTranspose,
        kConcatCols,
        kConcatRows,
        kSliceCols,
        kSliceRows,
        kReshape,
        kMeanRows,
        kSum,
        kSoftmaxCeRows,
        kMseMean,
        kMseRowSumMean,
        kConv2d,
        kConvT2d,
    };

    struct Node {
        Op op = Op::kLeaf;
        bool needs = false;
        Id a = -1, b = -1, p2 = -1;
        int i0 = 0, i1 = 0;
        T c0 = T(0);
        TensorT<T> value;
        TensorT<T> grad;
        ParamT<T>* sink = nullptr;
        std::vector<Id> plist;
        std::vector<T> aux;
        ConvSpec conv;
    };

    std::vector<Node> nodes_;

    const Node& node(Id id) const {
        if (id < 0 || static_cast<size_t>(id) >= nodes_.size())
            throw UsageError("invalid graph node id");
        return nodes_[id];
    }
    Node& node_mut(Id id) { return const_cast<Node&>(node(id)); }

    Id push(Op op, TensorT<T> value, Id a, Id b, bool force_needs = false) {
        Node n;
        n.op = op;
        n.value = std::move(value);
        n.a = a;
        n.b = b;
        n.needs = force_needs || (a >= 0 && nodes_[a].needs) || (b >= 0 && nodes_[b].needs);
        nodes_.push_back(std::move(n));
        return static_cast<Id>(nodes_.size() - 1);
    }

    void refresh_needs(Id id) {
        Node& n = nodes_[id];
        for (Id p : n.plist) n.needs = n.needs || nodes_[p].needs;
    }

    TensorT<T>& ensure_grad(Id id) {
        Node& n = nodes_[id];
        if (n.grad.empty()) n.grad = TensorT<T>::zeros(n.value.shape);
        return n.grad;
    }

    bool wants(Id id) const { return id >= 0 && nodes_[id].needs; }

    static MatMap<T> mat(TensorT<T>& t) { return MatMap<T>(t.data.data(), t.rows(), t.cols()); }
    static CMatMap<T> cmat(const TensorT<T>& t) {
        return CMatMap<T>(t.data.data(), t.rows(), t.cols());
    }

    static void im2col(const T* img, T* cols, int h, int w, int c, int k, int stride, int pad,
                       int grid_h, int grid_w) {
        size_t idx = 0;
        for (int gy = 0; gy < grid_h; ++gy) {
            for (int gx = 0; gx < grid_w; ++gx) {
                for (int ky = 0; ky < k; ++ky) {
                    const int iy = gy * stride - pad + ky;
                    for (int kx = 0; kx < k; ++kx) {
                        const int ix = gx * stride - pad + kx;
                        if (iy < 0 || iy >= h || ix < 0 || ix >= w) {
                            for (int ch = 0; ch < c; ++ch) cols[idx++] = T(0);
                        } else {
                            const T* src = img + (static_cast<size_t>(iy) * w + ix) * c;
                            for (int ch = 0; ch < c; ++ch) cols[idx++] = src[ch];
                        }
                    }
                }
            }
        }
    }

    static void col2im(const T* cols, T* img, int h, int w, int c, int k, int stride, int pad,
                       int grid_h, int grid_w) {
        size_t idx = 0;
        for (int gy = 0; gy < grid_h; ++gy) {
            for (int gx = 0; gx < grid_w; ++gx) {
                for (int ky = 0; ky < k; ++ky) {
                    const int iy = gy * stride - pad + ky;
                    for (int kx = 0; kx < k; ++kx) {
                        const int ix = gx * stride - pad + kx;
                        if (iy < 0 || iy >= h || ix < 0 || ix >= w) {
                            idx += c;
                        } else {
                            T* dst = img + (static_cast<size_t>(iy) * w + ix) * c;
                            for (int ch = 0; ch < c; ++ch) dst[ch] += cols[idx++];
                        }
                    }
                }
            }
        }
    }

    void dispatch_backward(Node& n) {
        const TensorT<T>& g = n.grad;
        switch (n.op) {
            case Op::kLeaf:
                break;
            case Op::kMatmul: {
                const auto& A = nodes_[n.a].value;
                const auto& B = nodes_[n.b].value;
                if (wants(n.a)) mat(ensure_grad(n.a)) += cmat(g) * cmat(B).transpose();
                if (wants(n.b)) mat(ensure_grad(n.b)) += cmat(A).transpose() * cmat(g);
                break;
            }
            case Op::kAdd: {
                for (Id p : {n.a, n.b})
                    if (wants(p)) {
                        auto& pg = ensure_grad(p);
                        for (int64_t i = 0; i < g.numel(); ++i) pg[i] += g[i];
                    }
                break;
            }
            case Op::kAddBias: {
                if (wants(n.a)) {
                    auto& pg = ensure_grad(n.a);
                    for (int64_t i = 0; i < g.numel(); ++i) pg[i] += g[i];
                }
                if (wants(n.b)) {
                    auto& bg = ensure_grad(n.b);
                    const int r = g.rows(), c = g.cols();
                    for (int i = 0; i < r; ++i)
                        for (int j = 0; j < c; ++j) bg[j] += g(i, j);
                }
                break;
            }
            case Op::kMul: {
                const auto& A = nodes_[n.a].value;
                const auto& B = nodes_[n.b].value;
                if (wants(n.a)) {
                    auto& pg = ensure_grad(n.a);
                    for (int64_t i = 0; i < g.numel(); ++i) pg[i] += g[i] * B[i];
                }
                if (wants(n.b)) {
                    auto& pg = ensure_grad(n.b);
                    for (int64_t i = 0; i < g.numel(); ++i) pg[i] += g[i] * A[i];
                }
                break;
            }
            case Op::kAffine: {
                if (wants(n.a)) {
                    auto& pg = ensure_grad(n.a);
                    for (int64_t i = 0; i < g.numel(); ++i) pg[i] += n.c0 * g[i];
                }
                break;
            }
            case Op::kRelu: {
                if (wants(n.a)) {
                    const auto& X = nodes_[n.a].value;
                    auto& pg = ensure_grad(n.a);
                    for (int64_t i = 0; i < g.numel(); ++i)
                        if (X[i] > T(0)) pg[i] += g[i];
                }
                break;
            }
            case Op::kTanh: {
                if (wants(n.a)) {
                    auto& pg = ensure_grad(n.a);
                    for (int64_t i = 0; i < g.numel(); ++i)
                        pg[i] += g[i] * (T(1) - n.value[i] * n.value[i]);
                }
                break;
            }
            case Op::kSigmoid: {
                if (wants(n.a)) {
                    auto& pg = ensure_grad(n.a);
                    for (int64_t i = 0; i < g.numel(); ++i)
                        pg[i] += g[i] * n.value[i] * (T(1) - n.value[i]);
                }
                break;
            }
            case Op::kSoftmaxRows: {
                if (wants(n.a)) {
                    auto& pg = ensure_grad(n.a);
                    const int r = g.rows(), c = g.cols(), vc = n.i0;
                    for (int i = 0; i < r; ++i) {
                        const T* y = n.value.data.data() + static_cast<size_t>(i) * c;
                        const T* gr = g.data.data() + static_cast<size_t>(i) * c;
                        T dot = T(0);
                        for (int j = 0; j < vc; ++j) dot += gr[j] * y[j];
                        T* pgr = pg.data.data() + static_cast<size_t>(i) * c;
                        for (int j = 0; j < vc; ++j) pgr[j] += y[j] * (gr[j] - dot);
                    }
                }
                break;
            }
            case Op::kTranspose: {
                if (wants(n.a)) mat(ensure_grad(n.a)) += cmat(g).transpose();
                break;
            }
            case Op::kConcatCols: {
                const int r = n.value.rows(), c = n.value.cols();
                int off = 0;
                for (Id p : n.plist) {
                    const int pc = nodes_[p].value.cols();
                    if (wants(p)) {
                        auto& pg = ensure_grad(p);
                        for (int i = 0; i < r; ++i)
                            for (int j = 0; j < pc; ++j)
                                pg.data[static_cast<size_t>(i) * pc + j] +=
                                    g.data[static_cast<size_t>(i) * c + off + j];
                    }
                    off += pc;
                }
                break;
            }
            case Op::kConcatRows: {
                size_t off = 0;
                for (Id p : n.plist) {
                    const auto& pv = nodes_[p].value;
                    if (wants(p)) {
                        auto& pg = ensure_grad(p);
                        for (int64_t i = 0; i < pv.numel(); ++i) pg[i] += g.data[off + i];
                    }
                    off += pv.data.size();
                }
                break;
            }
            case Op::kSliceCols: {
                if (wants(n.a)) {
                    auto& pg = ensure_grad(n.a);
                    const int r = g.rows(), w = g.cols(), c = pg.cols();
                    for (int i = 0; i < r; ++i)
                        for (int j = 0; j < w; ++j)
                            pg.data[static_cast<size_t>(i) * c + n.i0 + j] +=
                                g.data[static_cast<size_t>(i) * w + j];
                }
                break;
            }
            case Op::kSliceRows: {
                if (wants(n.a)) {
                    auto& pg = ensure_grad(n.a);
                    const int c = g.cols();
                    for (int64_t i = 0; i < g.numel(); ++i)
                        pg.data[static_cast<size_t>(n.i0) * c + i] += g[i];
                }
                break;
            }
            case Op::kReshape: {
                if (wants(n.a)) {
                    auto& pg = ensure_grad(n.a);
                    for (int64_t i = 0; i < g.numel(); ++i) pg[i] += g[i];
                }
                break;
            }
            case Op::kMeanRows: {
                if (wants(n.a)) {
                    auto& pg = ensure_grad(n.a);
                    const int r = pg.rows(), c = pg.cols();
                    const T inv = T(1) / static_cast<T>(r);
                    for (int i = 0; i < r; ++i)
                        for (int j = 0; j < c; ++j)
                            pg.data[static_cast<size_t>(i) * c + j] += g[j] * inv;
                }
                break;
            }
            case Op::kSum: {
                if (wants(n.a)) {
                    auto& pg = ensure_grad(n.a);
                    for (int64_t i = 0; i < pg.numel(); ++i) pg[i] += g[0];
                }
                break;
            }
            case Op::kSoftmaxCeRows: {
                if (wants(n.a)) {
                    auto& pg = ensure_grad(n.a);
                    const auto& Y = nodes_[n.b].value;
                    const T s = g[0] / static_cast<T>(pg.rows());
                    for (int64_t i = 0; i < pg.numel(); ++i)
                        pg[i] += s * (n.aux[static_cast<size_t>(i)] - Y[i]);
                }
                break;
            }
            case Op::kMseMean:
            case Op::kMseRowSumMean: {
                const auto& A = nodes_[n.a].value;
                const auto& B = nodes_[n.b].value;
                const T denom = n.op == Op::kMseMean ? static_cast<T>(A.numel())
                                                     : static_cast<T>(A.rows());
                const T s = T(2) * g[0] / denom;
                if (wants(n.a)) {
                    auto& pg = ensure_grad(n.a);
                    for (int64_t i = 0; i < A.numel(); ++i) pg[i] += s * (A[i] - B[i]);
                }
                if (wants(n.b)) {
                    auto& pg = ensure_grad(n.b);
                    for (int64_t i = 0; i < A.numel(); ++i) pg[i] -= s * (A[i] - B[i]);
                }
                break;
            }
            case Op::kConv2d: {
                const ConvSpec& cs = n.conv;
                const int bsz = n.value.shape[0];
                const int grid = cs.out_h * cs.out_w;
                const int patch = cs.k * cs.k * cs.in_c;
                if (wants(n.p2)) {
                    auto& bg = ensure_grad(n.p2);
                    for (int64_t i = 0; i < g.numel(); ++i) bg[i % cs.out_c] += g[i];
                }
                const auto& W = nodes_[n.b].value;
                std::vector<T> dcols;
                if (wants(n.a)) dcols.resize(static_cast<size_t>(grid) * patch);
                for (int b = 0; b < bsz; ++b) {
                    CMatMap<T> gb(g.data.data() + static_cast<size_t>(b) * grid * cs.out_c, grid,
                                  cs.out_c);
                    CMatMap<T> cb(n.aux.data() + static_cast<size_t>(b) * grid * patch, grid,
                                  patch);
                    if (wants(n.b)) mat(ensure_grad(n.b)) += cb.transpose() * gb;
                    if (wants(n.a)) {
                        MatMap<T>(dcols.data(), grid, patch) = gb * cmat(W).transpose();
                        auto& xg = ensure_grad(n.a);
                        col2im(dcols.data(),
                               xg.data.data() + static_cast<size_t>(b) * cs.in_h * cs.in_w * cs.in_c,
                               cs.in_h, cs.in_w, cs.in_c, cs.k, cs.stride, cs.pad, cs.out_h,
                               cs.out_w);
                    }
                }
                break;
            }
            case Op::kConvT2d: {
                const ConvSpec& cs = n.conv;
                const int bsz = n.value.shape[0];
                const int grid = cs.in_h * cs.in_w;
                const int patch = cs.k * cs.k * cs.out_c;
                if (wants(n.p2)) {
                    auto& bg = ensure_grad(n.p2);
                    for (int64_t i = 0; i < g.numel(); ++i) bg[i % cs.out_c] += g[i];
                }
                const auto& X = nodes_[n.a].value;
                const auto& W = nodes_[n.b].value;
                std::vector<T> dcols(static_cast<size_t>(grid) * patch);
                for (int b = 0; b < bsz; ++b) {
                    im2col(g.data.data() + static_cast<size_t>(b) * cs.out_h * cs.out_w * cs.out_c,
                           dcols.data(), cs.out_h, cs.out_w, cs.out_c, cs.k, cs.stride, cs.pad,
                           cs.in_h, cs.in_w);
                    CMatMap<T> dc(dcols.data(), grid, patch);
                    if (wants(n.a)) {
                        MatMap<T> xg(ensure_grad(n.a).data.data() +
                                         static_cast<size_t>(b) * grid * cs.in_c,
                                     grid, cs.in_c);
                        xg += dc * cmat(W).transpose();
                    }
                    if (wants(n.b)) {
                        CMatMap<T> xb(X.data.data() + static_cast<size_t>(b) * grid * cs.in_c,
                                      grid, cs.in_c);
                        mat(ensure_grad(n.b)) += xb.transpose() * dc;
                    }
                }
                break;
            }
        }
    }
};

using Graph = GraphT<double>;
using GraphF = GraphT<float>;

}  // namespace xmodal
