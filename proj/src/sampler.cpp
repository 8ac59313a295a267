#include "k2gen/sampler.hpp"

#include "k2gen/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace k2gen {

std::vector<double> UniformModel::distribution(std::span<const int>, const NextSlot&) const {
    const auto n = static_cast<std::size_t>(vocab_.size());
    return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

NgramModel::NgramModel(Vocabulary vocab, std::span<const TokenSequence> corpus, int n)
    : vocab_(std::move(vocab)), n_(n), unigram_(static_cast<std::size_t>(vocab_.size()), 0) {
    if (n < 1) throw InvalidArgument("n-gram order must be >= 1");
    if (corpus.empty()) throw InvalidArgument("n-gram model needs a non-empty corpus");
    for (const auto& seq : corpus) {
        if (seq.header.k != vocab_.k()) throw InvalidArgument("corpus sequence has a different k");
        const auto ids = vocab_.encode(seq);
        std::vector<int> padded(static_cast<std::size_t>(n_ - 1), Vocabulary::bos);
        padded.insert(padded.end(), ids.begin(), ids.end());
        for (std::size_t t = static_cast<std::size_t>(n_ - 1); t < padded.size(); ++t) {
            const int id = padded[t];
            ++unigram_[static_cast<std::size_t>(id)];
            ++total_;
            if (n_ == 1) continue;
            std::vector<int> ctx(padded.begin() + static_cast<std::ptrdiff_t>(t) - (n_ - 1),
                                 padded.begin() + static_cast<std::ptrdiff_t>(t));
            ++table_[ctx][id];
            ++context_totals_[ctx];
        }
    }
}

std::int64_t NgramModel::unigram_count(int id) const {
    return unigram_.at(static_cast<std::size_t>(id));
}

std::int64_t NgramModel::context_count(std::span<const int> context) const {
    auto it = context_totals_.find(std::vector<int>(context.begin(), context.end()));
    return it == context_totals_.end() ? 0 : it->second;
}

std::int64_t NgramModel::count(std::span<const int> context, int id) const {
    auto it = table_.find(std::vector<int>(context.begin(), context.end()));
    if (it == table_.end()) return 0;
    auto jt = it->second.find(id);
    return jt == it->second.end() ? 0 : jt->second;
}

std::vector<double> NgramModel::distribution(std::span<const int> prefix, const NextSlot&) const {
    const auto v = static_cast<std::size_t>(vocab_.size());
    std::vector<double> p(v);
    std::vector<int> ctx;
    if (n_ > 1) {
        const auto need = static_cast<std::size_t>(n_ - 1);
        ctx.assign(need > prefix.size() ? need - prefix.size() : 0, Vocabulary::bos);
        const auto from = prefix.size() > need ? prefix.size() - need : 0;
        ctx.insert(ctx.end(), prefix.begin() + static_cast<std::ptrdiff_t>(from), prefix.end());
    }
    auto totals = n_ > 1 ? context_totals_.find(ctx) : context_totals_.end();
    if (totals == context_totals_.end()) {
        const double denom = static_cast<double>(total_) + static_cast<double>(v);
        for (std::size_t id = 0; id < v; ++id) p[id] = (static_cast<double>(unigram_[id]) + 1.0) / denom;
        return p;
    }
    const auto& row = table_.at(ctx);
    const double denom = static_cast<double>(totals->second) + static_cast<double>(v);
    for (std::size_t id = 0; id < v; ++id) p[id] = 1.0 / denom;
    for (const auto& [id, c] : row) p[static_cast<std::size_t>(id)] = (static_cast<double>(c) + 1.0) / denom;
    return p;
}

// ---------------------------------------------------------------------------

std::vector<char> valid_token_mask(const NextSlot& slot, const TreeHeader& header, const Vocabulary& vocab) {
    if (vocab.k() != header.k) throw InvalidArgument("vocabulary k does not match the sequence header");
    if (header.featured && !vocab.featured()) throw InvalidArgument("featured generation needs a featured vocabulary");
    std::vector<char> mask(static_cast<std::size_t>(vocab.size()), 0);
    const bool labels = header.featured && slot.leaf_level;
    std::int64_t first = Vocabulary::reserved, last = vocab.core();
    if (labels) {
        first = vocab.core();
        last = vocab.size();
    } else if (slot.kind == TokenKind::diagonal) {
        last = Vocabulary::reserved + (std::int64_t{1} << diagonal_arity(vocab.k()));
    } else {
        first = Vocabulary::reserved + (std::int64_t{1} << diagonal_arity(vocab.k()));
    }
    for (auto id = first; id < last; ++id) {
        const Token t = vocab.token(static_cast<int>(id));
        if (!check_token(t, slot, header)) mask[static_cast<std::size_t>(id)] = 1;
    }
    return mask;
}

namespace {

// Uniform double in [0, 1) from the top 53 bits, identical on every platform.
double unit_draw(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

TokenSequence sample_sequence(const SamplerModel& model, const GenerationConfig& config) {
    const Vocabulary& vocab = model.vocabulary();
    if (config.max_tokens < 1) throw InvalidArgument("max_tokens must be >= 1");
    if (config.node_counts.empty()) throw InvalidArgument("generation needs at least one node count");

    std::mt19937_64 rng(config.seed);
    const int n = config.node_counts.size() == 1
                      ? config.node_counts.front()
                      : config.node_counts[static_cast<std::size_t>(rng() % config.node_counts.size())];

    TreeHeader header;
    header.k = vocab.k();
    header.original_n = n;
    header.padded_n = padded_size(n, vocab.k());
    header.featured = config.featured;
    header.node_vocab = config.node_vocab;
    header.edge_vocab = config.edge_vocab;
    header.validate();

    IncrementalBuilder builder(header);
    TokenSequence out{header, {}};
    std::vector<int> prefix;
    while (!builder.complete()) {
        if (out.tokens.size() >= config.max_tokens)
            throw SamplingError(SamplingErrc::max_length,
                                "maximum length " + std::to_string(config.max_tokens) + " reached before completion");
        const NextSlot& slot = builder.next_slot();
        const auto mask = valid_token_mask(slot, header, vocab);
        if (std::find(mask.begin(), mask.end(), 1) == mask.end())
            throw SamplingError(SamplingErrc::no_admissible_token, "no admissible token for the next slot");
        const auto probs = model.distribution(prefix, slot);
        if (probs.size() != mask.size()) throw InvalidArgument("model distribution size does not match vocabulary");

        double total = 0.0;
        for (std::size_t id = 0; id < probs.size(); ++id)
            if (mask[id] && probs[id] > 0.0) total += probs[id];
        if (!(total > 0.0) || !std::isfinite(total))
            throw SamplingError(SamplingErrc::zero_mass, "model assigns zero mass to every valid token");

        std::size_t chosen = probs.size();
        if (config.greedy) {
            double best = -1.0;
            for (std::size_t id = 0; id < probs.size(); ++id)
                if (mask[id] && probs[id] > best) {
                    best = probs[id];
                    chosen = id;
                }
        } else {
            const double target = unit_draw(rng) * total;
            double acc = 0.0;
            for (std::size_t id = 0; id < probs.size(); ++id) {
                if (!mask[id] || !(probs[id] > 0.0)) continue;
                acc += probs[id];
                chosen = id;
                if (target < acc) break;
            }
        }

        Token t = vocab.token(static_cast<int>(chosen));
        builder.step(t);
        prefix.push_back(static_cast<int>(chosen));
        out.tokens.push_back(std::move(t));
    }
    return out;
}

std::vector<int> empirical_node_counts(std::span<const TokenSequence> corpus) {
    std::vector<int> counts;
    counts.reserve(corpus.size());
    for (const auto& s : corpus) counts.push_back(s.header.original_n);
    return counts;
}

} // namespace k2gen
