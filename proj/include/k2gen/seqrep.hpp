#pragma once

#include "k2gen/errors.hpp"
#include "k2gen/k2tree.hpp"
#include "k2gen/position.hpp"

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace k2gen {

// ---------------------------------------------------------------------------
// Pruning

/// Drops every node whose submatrix lies strictly above the diagonal (p < q).
PrunedK2Tree prune(const K2Tree& t);

/// Restores the mirrored upper-triangle subtrees by transposing their
/// lower-triangle counterparts.
K2Tree unprune(const PrunedK2Tree& pt);

/// Number of surviving children of an expanded diagonal node: K(K+1)/2.
constexpr int diagonal_arity(int k) noexcept { return k * (k + 1) / 2; }
constexpr int offdiagonal_arity(int k) noexcept { return k * k; }

/// Sibling orders of the survivors of a diagonal node, ascending by rank
/// K(i-1)+j: (1,1), (2,1), (2,2), ... for K = 2.
std::vector<SiblingOrder> diagonal_child_orders(int k);

// ---------------------------------------------------------------------------
// Tokens

enum class TokenKind : std::uint8_t { diagonal, offdiagonal };

const char* to_string(TokenKind kind) noexcept;

/// One sibling group. Diagonal tokens hold K(K+1)/2 values in ascending
/// sibling rank; off-diagonal tokens hold K^2 values in row-major order.
struct Token {
    TokenKind kind = TokenKind::diagonal;
    std::vector<std::int32_t> values;

    bool all_zero() const noexcept;
    bool operator==(const Token&) const = default;
    auto operator<=>(const Token&) const = default;
};

struct TokenSequence {
    TreeHeader header;
    std::vector<Token> tokens;

    std::size_t length() const noexcept { return tokens.size(); }
    /// Total number of attributes, i.e. the non-root node count of the pruned tree.
    std::size_t element_count() const noexcept;

    bool operator==(const TokenSequence&) const = default;
};

/// Breadth-first sibling groups of the pruned tree. Throws EmptyGraphError
/// when the root is a leaf.
TokenSequence flatten_tokenize(const PrunedK2Tree& pt);

/// Inverse of flatten_tokenize, driven by the FIFO builder. A sequence with
/// no tokens decodes to the single zero root (the empty graph).
PrunedK2Tree detokenize_build(const TokenSequence& s);

/// Root-to-parent path of the node each token expands; the first is empty.
std::vector<PositionPath> position_paths(const TokenSequence& s);

/// Whole pipeline for an already ordered graph. Empty graphs become a
/// header-only sequence.
TokenSequence encode_graph(const Graph& ordered, int k, bool featured = false);
Graph decode_sequence(const TokenSequence& s);

// ---------------------------------------------------------------------------
// Incremental construction

/// Admissible values for one element of the next token.
enum class SlotRule : std::uint8_t {
    zero,          // plain block whose only real cell is on the diagonal
    padding,       // lies entirely in padding
    any_binary,    // 0 or 1
    one,           // featured block that contains a real node's diagonal cell
    node_label,    // featured diagonal cell of a real node
    edge_or_zero,  // featured off-diagonal cell between real nodes
};

/// What the builder expects next.
struct NextSlot {
    TokenKind kind = TokenKind::diagonal;
    PositionPath path;       // path of the node being expanded
    int child_depth = 1;     // depth of the children the token creates
    bool leaf_level = false; // children are 1x1 cells
    std::vector<SlotRule> rules;
};

/// Checks a token against the element rules. Returns the error it would
/// raise, or nullopt when admissible. `all_zero` is always rejected.
std::optional<DecodeErrc> check_token(const Token& t, const NextSlot& slot, const TreeHeader& h);

/// Single-owner state machine that grows a pruned tree one token at a time.
class IncrementalBuilder {
public:
    enum class Status { need_more, complete };

    explicit IncrementalBuilder(TreeHeader header);

    struct StepResult {
        Status status = Status::need_more;
        std::optional<NextSlot> next; // set while need_more
    };

    /// Applies `t` to the front of the queue. Throws DecodeError on a kind,
    /// arity or value mismatch; the builder is unchanged in that case.
    StepResult step(const Token& t);

    bool complete() const noexcept { return queue_.empty(); }
    std::size_t steps() const noexcept { return steps_; }
    const TreeHeader& header() const noexcept { return header_; }
    /// Expectation for the next token. Requires !complete().
    const NextSlot& next_slot() const;

    /// Finished tree. Throws DecodeError(truncated) while frontier nodes remain.
    PrunedK2Tree tree() const;

private:
    void refresh_slot();

    TreeHeader header_;
    std::vector<TreeNode> nodes_;
    std::vector<std::pair<std::int64_t, std::int64_t>> origin_;
    std::deque<std::size_t> queue_;
    NextSlot slot_;
    std::size_t steps_ = 0;
};

// ---------------------------------------------------------------------------
// Vocabulary

/// Integer ids for tokens: 0 = BOS, 1 = EOS, 2 = PAD, then every diagonal bit
/// pattern, then every off-diagonal bit pattern (both read as binary numbers,
/// first element most significant). Featured vocabularies append the label
/// tokens seen at leaf level, sorted.
class Vocabulary {
public:
    static constexpr int bos = 0;
    static constexpr int eos = 1;
    static constexpr int pad = 2;
    static constexpr int reserved = 3;

    explicit Vocabulary(int k);
    /// Featured vocabulary; label tokens are deduplicated and sorted.
    Vocabulary(int k, std::vector<Token> label_tokens);
    /// Collects leaf-level label tokens from featured sequences.
    static Vocabulary from_corpus(int k, std::span<const TokenSequence> corpus);

    int k() const noexcept { return k_; }
    bool featured() const noexcept { return featured_; }
    /// 2^(K^2) + 2^(K(K+1)/2).
    static std::int64_t core_size(int k);
    std::int64_t core() const noexcept { return core_; }
    std::int64_t size() const noexcept { return core_ + static_cast<std::int64_t>(labels_.size()); }
    std::span<const Token> label_tokens() const noexcept { return labels_; }

    /// `leaf_level` selects the label-token table in featured vocabularies.
    int id(const Token& t, bool leaf_level = false) const;
    Token token(int id) const;
    bool is_label_id(int id) const noexcept { return id >= core_ && id < size(); }

    /// Ids of a whole sequence (BOS/EOS not included).
    std::vector<int> encode(const TokenSequence& s) const;

    std::string serialize() const;
    static Vocabulary parse(std::string_view text);

    bool operator==(const Vocabulary&) const = default;

private:
    int k_;
    bool featured_ = false;
    std::int64_t core_;
    std::vector<Token> labels_;
};

// ---------------------------------------------------------------------------
// Token-stream text format

std::string format_token(const Token& t, bool featured);
Token parse_token(std::string_view text, bool featured);
std::string serialize_token_stream(const TokenSequence& s);
TokenSequence parse_token_stream(std::string_view text);

} // namespace k2gen
