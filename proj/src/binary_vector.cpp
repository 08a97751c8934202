#include "cosime/binary_vector.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "cosime/error.hpp"

namespace cosime {

BinaryVector::BinaryVector(std::size_t dim) : dim_(dim), words_((dim + 63) / 64, 0ULL) {}

BinaryVector BinaryVector::from_string(std::string_view bits) {
    BinaryVector v(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        const char c = bits[i];
        if (c == '1') {
            v.set(i, true);
        } else if (c != '0') {
            throw InputError("invalid bit character '" + std::string(1, c) + "' at column " +
                             std::to_string(i + 1));
        }
    }
    return v;
}

BinaryVector BinaryVector::from_bits(const std::vector<int>& bits) {
    BinaryVector v(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) v.set(i, bits[i] != 0);
    return v;
}

void BinaryVector::set(std::size_t i, bool value) {
    const std::uint64_t mask = 1ULL << (i & 63);
    if (value) {
        words_[i >> 6] |= mask;
    } else {
        words_[i >> 6] &= ~mask;
    }
}

std::size_t BinaryVector::popcount() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

void BinaryVector::check_same_size(const BinaryVector& other) const {
    if (other.dim_ != dim_) {
        throw ShapeError("bit vector length mismatch: " + std::to_string(dim_) + " vs " +
                         std::to_string(other.dim_));
    }
}

std::size_t BinaryVector::and_count(const BinaryVector& other) const {
    check_same_size(other);
    std::size_t n = 0;
    for (std::size_t k = 0; k < words_.size(); ++k)
        n += static_cast<std::size_t>(std::popcount(words_[k] & other.words_[k]));
    return n;
}

std::size_t BinaryVector::xor_count(const BinaryVector& other) const {
    check_same_size(other);
    std::size_t n = 0;
    for (std::size_t k = 0; k < words_.size(); ++k)
        n += static_cast<std::size_t>(std::popcount(words_[k] ^ other.words_[k]));
    return n;
}

void BinaryVector::clear_tail() {
    if (dim_ % 64 != 0 && !words_.empty()) words_.back() &= (1ULL << (dim_ % 64)) - 1;
}

BinaryVector BinaryVector::operator~() const {
    BinaryVector r = *this;
    for (auto& w : r.words_) w = ~w;
    r.clear_tail();
    return r;
}

BinaryVector BinaryVector::operator|(const BinaryVector& other) const {
    check_same_size(other);
    BinaryVector r = *this;
    for (std::size_t k = 0; k < words_.size(); ++k) r.words_[k] |= other.words_[k];
    return r;
}

BinaryVector BinaryVector::operator&(const BinaryVector& other) const {
    check_same_size(other);
    BinaryVector r = *this;
    for (std::size_t k = 0; k < words_.size(); ++k) r.words_[k] &= other.words_[k];
    return r;
}

std::string BinaryVector::to_string() const {
    std::string s(dim_, '0');
    for (std::size_t i = 0; i < dim_; ++i)
        if (get(i)) s[i] = '1';
    return s;
}

std::vector<BinaryVector> parse_words(std::string_view text) {
    std::vector<BinaryVector> words;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) {
            if (end == text.size()) break;
            continue;
        }
        try {
            words.push_back(BinaryVector::from_string(line));
        } catch (const InputError& e) {
            throw ParseError(e.what(), line_no);
        }
        if (words.back().size() != words.front().size()) {
            throw ParseError("word length " + std::to_string(words.back().size()) +
                                 " differs from first word length " +
                                 std::to_string(words.front().size()),
                             line_no);
        }
        if (end == text.size()) break;
    }
    if (words.empty()) throw InputError("no words found");
    return words;
}

std::vector<BinaryVector> load_words(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InputError("cannot open word file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    try {
        return parse_words(ss.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.detail(), e.line());
    }
}

void write_words(const std::vector<BinaryVector>& words, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw InputError("cannot write word file: " + path);
    for (const auto& w : words) f << w.to_string() << '\n';
}

}  // namespace cosime
