#include "lockbreak/bits.hpp"

#include <algorithm>

namespace lockbreak {

BitVector BitVector::from_string(std::string_view text) {
    BitVector v;
    v.bits_.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (ch != '0' && ch != '1')
            throw Error("bits", "invalid bit character '" + std::string(1, ch) + "' at offset " +
                                    std::to_string(i));
        v.bits_.push_back(ch == '1' ? 1 : 0);
    }
    return v;
}

BitVector BitVector::from_uint(std::uint64_t value, std::size_t width) {
    BitVector v(width);
    for (std::size_t i = 0; i < width && i < 64; ++i) v.bits_[i] = (value >> i) & 1U;
    return v;
}

std::size_t BitVector::count() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::string BitVector::to_string() const {
    std::string s(bits_.size(), '0');
    for (std::size_t i = 0; i < bits_.size(); ++i)
        if (bits_[i]) s[i] = '1';
    return s;
}

BitVector concat(const BitVector& a, const BitVector& b) {
    BitVector out = a;
    for (std::size_t i = 0; i < b.size(); ++i) out.push_back(b[i]);
    return out;
}

Key parse_key_text(std::string_view text) {
    if (!text.empty() && text.back() == '\n') text.remove_suffix(1);
    if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
    if (text.empty()) throw Error("locking", "key file is empty");
    return Key::from_string(text);
}

std::string key_text(const Key& key) { return key.to_string() + "\n"; }

}  // namespace lockbreak
