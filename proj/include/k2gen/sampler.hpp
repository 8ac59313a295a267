#pragma once

#include "k2gen/seqrep.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace k2gen {

/// Next-token distribution p(y_t | y_1..y_{t-1}) over vocabulary ids.
///
/// Implementations return one probability per id. The sampler restricts it to
/// the structurally valid ids and renormalizes, so mass placed on invalid ids
/// is simply discarded.
class SamplerModel {
public:
    virtual ~SamplerModel() = default;

    virtual const Vocabulary& vocabulary() const = 0;
    virtual std::vector<double> distribution(std::span<const int> prefix, const NextSlot& next) const = 0;
};

/// Uniform over the vocabulary; after masking, uniform over the valid tokens.
class UniformModel final : public SamplerModel {
public:
    explicit UniformModel(Vocabulary vocab) : vocab_(std::move(vocab)) {}

    const Vocabulary& vocabulary() const override { return vocab_; }
    std::vector<double> distribution(std::span<const int> prefix, const NextSlot& next) const override;

private:
    Vocabulary vocab_;
};

/// Maximum-likelihood n-gram over token ids with add-one smoothing. The
/// context is left-padded with BOS; a context never seen in training falls
/// back to the smoothed unigram.
class NgramModel final : public SamplerModel {
public:
    NgramModel(Vocabulary vocab, std::span<const TokenSequence> corpus, int n);

    int order() const noexcept { return n_; }
    const Vocabulary& vocabulary() const override { return vocab_; }
    std::vector<double> distribution(std::span<const int> prefix, const NextSlot& next) const override;

    std::int64_t unigram_count(int id) const;
    std::int64_t context_count(std::span<const int> context) const;
    std::int64_t count(std::span<const int> context, int id) const;

private:
    Vocabulary vocab_;
    int n_;
    std::vector<std::int64_t> unigram_;
    std::int64_t total_ = 0;
    std::map<std::vector<int>, std::map<int, std::int64_t>> table_;
    std::map<std::vector<int>, std::int64_t> context_totals_;
};

struct GenerationConfig {
    std::size_t max_tokens = 4096;
    std::uint64_t seed = 0;
    /// Node counts to draw from; one entry fixes the size. The padded size
    /// follows as the smallest power of k covering it.
    std::vector<int> node_counts;
    bool greedy = false;
    // Featured generation: label vocabulary sizes written into the header.
    bool featured = false;
    int node_vocab = 0;
    int edge_vocab = 0;
};

/// Ids admissible in `slot`: the right kind, not all-zero, consistent with the
/// padding region and, at leaf level of featured trees, label tokens only.
/// BOS, EOS and PAD are never admissible mid-sequence.
std::vector<char> valid_token_mask(const NextSlot& slot, const TreeHeader& header, const Vocabulary& vocab);

/// Drives an IncrementalBuilder until the tree is complete. Deterministic for
/// a given (model, config). Throws SamplingError on max length or zero mass.
TokenSequence sample_sequence(const SamplerModel& model, const GenerationConfig& config);

/// Node counts of a corpus, in corpus order, for GenerationConfig::node_counts.
std::vector<int> empirical_node_counts(std::span<const TokenSequence> corpus);

} // namespace k2gen
