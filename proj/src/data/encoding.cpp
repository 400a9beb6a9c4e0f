#include "data/encoding.hpp"

namespace xmodal {

Tensor encode_language(const Vocabulary& vocab, TaskSignal signal,
                       const std::optional<SurfaceDescription>& description) {
    if (signal_requires_description(signal) != description.has_value())
        throw UsageError(std::string("signal '") + to_string(signal) +
                         (description ? "' does not take a description"
                                      : "' requires a description"));
    Tensor rows = Tensor::zeros({kLangLen, Vocabulary::kSize});
    rows(0, vocab.signal_index(signal)) = 1.0;
    if (description) {
        rows(1, description->action_word) = 1.0;
        rows(2, description->color_word) = 1.0;
        rows(3, description->speed_word) = 1.0;
    }
    rows(4, vocab.eos_index()) = 1.0;
    return rows;
}

std::vector<int> argmax_rows(const Tensor& rows) {
    const int r = rows.rows(), c = rows.cols();
    std::vector<int> out(static_cast<size_t>(r));
    for (int i = 0; i < r; ++i) {
        int best = 0;
        for (int j = 1; j < c; ++j)
            if (rows(i, j) > rows(i, best)) best = j;
        out[static_cast<size_t>(i)] = best;
    }
    return out;
}

SurfaceDescription description_from_rows(const Vocabulary& vocab, const Tensor& lang) {
    if (lang.rows() != kLangLen || lang.cols() != Vocabulary::kSize)
        throw DimensionError("language block must be 5 x 28");
    const auto tokens = argmax_rows(lang);
    SurfaceDescription d{tokens[1], tokens[2], tokens[3]};
    // validates the category layout
    (void)vocab.meaning_of(d);
    return d;
}

}  // namespace xmodal
