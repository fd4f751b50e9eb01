#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lockbreak/error.hpp"

namespace lockbreak {

// Ordered bit vector; element i is pin i in declaration order.
class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t width, bool value = false) : bits_(width, value ? 1 : 0) {}

    // '0'/'1' characters, left to right = index 0 upward.
    static BitVector from_string(std::string_view text);
    // Bit i = (value >> i) & 1.
    static BitVector from_uint(std::uint64_t value, std::size_t width);

    [[nodiscard]] std::size_t size() const noexcept { return bits_.size(); }
    [[nodiscard]] bool empty() const noexcept { return bits_.empty(); }
    [[nodiscard]] bool operator[](std::size_t i) const { return bits_[i] != 0; }
    void set(std::size_t i, bool value) { bits_[i] = value ? 1 : 0; }
    void flip(std::size_t i) { bits_[i] ^= 1; }
    void push_back(bool value) { bits_.push_back(value ? 1 : 0); }

    [[nodiscard]] std::span<const std::uint8_t> data() const noexcept { return bits_; }
    [[nodiscard]] std::size_t count() const noexcept;
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const BitVector&, const BitVector&) = default;

private:
    std::vector<std::uint8_t> bits_;
};

BitVector concat(const BitVector& a, const BitVector& b);

class Key {
public:
    Key() = default;
    explicit Key(BitVector bits) : bits_(std::move(bits)) {}

    static Key from_string(std::string_view text) { return Key(BitVector::from_string(text)); }
    static Key from_uint(std::uint64_t value, std::size_t width) {
        return Key(BitVector::from_uint(value, width));
    }

    [[nodiscard]] std::size_t width() const noexcept { return bits_.size(); }
    [[nodiscard]] bool operator[](std::size_t i) const { return bits_[i]; }
    void set(std::size_t i, bool value) { bits_.set(i, value); }
    void flip(std::size_t i) { bits_.flip(i); }
    [[nodiscard]] const BitVector& bits() const noexcept { return bits_; }
    [[nodiscard]] std::string to_string() const { return bits_.to_string(); }

    friend bool operator==(const Key&, const Key&) = default;

private:
    BitVector bits_;
};

// Key file body: one line of '0'/'1', optional trailing newline (LF or CRLF).
Key parse_key_text(std::string_view text);
std::string key_text(const Key& key);

}  // namespace lockbreak
