#pragma once

#include <optional>

#include "core/tensor.hpp"
#include "data/vocab.hpp"

namespace xmodal {

// Language input length: [signal, action word, color word, speed word, EOS].
constexpr int kLangLen = 5;

// One-hot N x 28 encoding. Signals without a description (describe,
// repeat-action) leave the three word rows all-zero; signals with one
// (execute, repeat-language) require it.
Tensor encode_language(const Vocabulary& vocab, TaskSignal signal,
                       const std::optional<SurfaceDescription>& description);

// Inverse of encode_language on the word rows; argmax per row.
SurfaceDescription description_from_rows(const Vocabulary& vocab, const Tensor& lang);

std::vector<int> argmax_rows(const Tensor& rows);

inline bool signal_requires_description(TaskSignal s) {
    return s == TaskSignal::kExecute || s == TaskSignal::kRepeatLanguage;
}

}  // namespace xmodal
