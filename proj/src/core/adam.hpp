#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "core/error.hpp"
#include "core/tensor.hpp"

namespace xmodal {

template <typename T>
struct AdamStateT {
    std::vector<TensorT<T>> first_moment;
    std::vector<TensorT<T>> second_moment;
    int64_t step_count = 0;
};

// Bias-corrected Adam over a fixed parameter list. Gradients are consumed
// from ParamT::grad and cleared after each step.
template <typename T>
class AdamT {
public:
    AdamT(std::vector<ParamT<T>*> params, T lr, T beta1 = T(0.9), T beta2 = T(0.999),
          T eps = T(1e-8))
        : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
        for (auto* p : params_) {
            state_.first_moment.push_back(TensorT<T>::zeros(p->value.shape));
            state_.second_moment.push_back(TensorT<T>::zeros(p->value.shape));
        }
    }

    void step() {
        state_.step_count += 1;
        const T bc1 = T(1) - std::pow(beta1_, static_cast<T>(state_.step_count));
        const T bc2 = T(1) - std::pow(beta2_, static_cast<T>(state_.step_count));
        for (size_t k = 0; k < params_.size(); ++k) {
            ParamT<T>& p = *params_[k];
            if (!p.grad.all_finite())
                throw NumericFault("non-finite gradient in parameter '" + p.name + "'");
            auto& m = state_.first_moment[k];
            auto& v = state_.second_moment[k];
            for (int64_t i = 0; i < p.value.numel(); ++i) {
                const T g = p.grad[i];
                m[i] = beta1_ * m[i] + (T(1) - beta1_) * g;
                v[i] = beta2_ * v[i] + (T(1) - beta2_) * g * g;
                const T mhat = m[i] / bc1;
                const T vhat = v[i] / bc2;
                p.value[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
            }
            p.zero_grad();
        }
    }

    const AdamStateT<T>& state() const { return state_; }
    AdamStateT<T>& state() { return state_; }
    T learning_rate() const { return lr_; }
    void set_learning_rate(T lr) { lr_ = lr; }

private:
    std::vector<ParamT<T>*> params_;
    AdamStateT<T> state_;
    T lr_, beta1_, beta2_, eps_;
};

using Adam = AdamT<double>;

}  // namespace xmodal
