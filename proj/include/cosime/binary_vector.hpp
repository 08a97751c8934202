#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cosime {

/// Fixed-length bit vector; the data word of the associative memory.
class BinaryVector {
public:
    BinaryVector() = default;
    explicit BinaryVector(std::size_t dim);

    /// Parses a '0'/'1' string. Throws InputError on any other character.
    static BinaryVector from_string(std::string_view bits);
    static BinaryVector from_bits(const std::vector<int>& bits);

    std::size_t size() const { return dim_; }
    bool empty() const { return dim_ == 0; }

    bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1ULL; }
    void set(std::size_t i, bool value);

    std::size_t popcount() const;
    /// popcount(this AND other)
    std::size_t and_count(const BinaryVector& other) const;
    /// popcount(this XOR other)
    std::size_t xor_count(const BinaryVector& other) const;

    BinaryVector operator~() const;
    BinaryVector operator|(const BinaryVector& other) const;
    BinaryVector operator&(const BinaryVector& other) const;

    std::string to_string() const;
    const std::vector<std::uint64_t>& words() const { return words_; }

    friend bool operator==(const BinaryVector&, const BinaryVector&) = default;

private:
    void check_same_size(const BinaryVector& other) const;
    void clear_tail();

    std::size_t dim_ = 0;
    std::vector<std::uint64_t> words_;
};

// One word per line, '0'/'1' only; blank lines are skipped. All words must
// share a length. Errors carry the 1-based line number.
std::vector<BinaryVector> parse_words(std::string_view text);
std::vector<BinaryVector> load_words(const std::string& path);
void write_words(const std::vector<BinaryVector>& words, const std::string& path);

}  // namespace cosime
