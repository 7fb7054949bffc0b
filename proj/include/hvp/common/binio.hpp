#ifndef HVP_COMMON_BINIO_HPP
#define HVP_COMMON_BINIO_HPP

#include <bit>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

namespace hvp {

// Little-endian binary writer into a growable byte buffer.
class BinWriter {
public:
    void u8(uint8_t v)
    {
        buf_.push_back(v);
    }
    void u16(uint16_t v)
    {
        for (int i = 0; i < 2; i++)
            buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
    }
    void u32(uint32_t v)
    {
        for (int i = 0; i < 4; i++)
            buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
    }
    void u64(uint64_t v)
    {
        for (int i = 0; i < 8; i++)
            buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
    }
    void bytes(const void* p, size_t len)
    {
        const auto* b = static_cast<const uint8_t*>(p);
        buf_.insert(buf_.end(), b, b + len);
    }
    void str(const std::string& s)
    {
        if (s.size() > 0xFFFF)
            throw std::invalid_argument("string too long to serialize");
        u16(static_cast<uint16_t>(s.size()));
        bytes(s.data(), s.size());
    }
    void u32vec(const std::vector<uint32_t>& v)
    {
        u32(static_cast<uint32_t>(v.size()));
        if constexpr (std::endian::native == std::endian::little) {
            bytes(v.data(), v.size() * 4);
        }
        else {
            for (uint32_t x : v)
                u32(x);
        }
    }
    void u64vec(const std::vector<uint64_t>& v)
    {
        u32(static_cast<uint32_t>(v.size()));
        if constexpr (std::endian::native == std::endian::little) {
            bytes(v.data(), v.size() * 8);
        }
        else {
            for (uint64_t x : v)
                u64(x);
        }
    }

    const std::vector<uint8_t>& data() const
    {
        return buf_;
    }
    std::vector<uint8_t> take()
    {
        return std::move(buf_);
    }

private:
    std::vector<uint8_t> buf_;
};

// Little-endian binary reader; throws std::runtime_error on truncation.
class BinReader {
public:
    BinReader(const uint8_t* data, size_t size) : p_(data), end_(data + size) {}
    explicit BinReader(const std::vector<uint8_t>& v)
        : BinReader(v.data(), v.size())
    {
    }

    uint8_t u8()
    {
        need(1);
        return *p_++;
    }
    uint16_t u16()
    {
        need(2);
        uint16_t v = 0;
        for (int i = 0; i < 2; i++)
            v |= static_cast<uint16_t>(*p_++) << (8 * i);
        return v;
    }
    uint32_t u32()
    {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; i++)
            v |= static_cast<uint32_t>(*p_++) << (8 * i);
        return v;
    }
    uint64_t u64()
    {
        need(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; i++)
            v |= static_cast<uint64_t>(*p_++) << (8 * i);
        return v;
    }
    std::string str()
    {
        uint16_t len = u16();
        need(len);
        std::string s(reinterpret_cast<const char*>(p_), len);
        p_ += len;
        return s;
    }
    std::vector<uint32_t> u32vec()
    {
        uint32_t len = u32();
        need(static_cast<size_t>(len) * 4);
        std::vector<uint32_t> v(len);
        if constexpr (std::endian::native == std::endian::little) {
            raw(v.data(), static_cast<size_t>(len) * 4);
        }
        else {
            for (auto& x : v)
                x = u32();
        }
        return v;
    }
    std::vector<uint64_t> u64vec()
    {
        uint32_t len = u32();
        need(static_cast<size_t>(len) * 8);
        std::vector<uint64_t> v(len);
        if constexpr (std::endian::native == std::endian::little) {
            raw(v.data(), static_cast<size_t>(len) * 8);
        }
        else {
            for (auto& x : v)
                x = u64();
        }
        return v;
    }
    void raw(void* out, size_t len)
    {
        need(len);
        std::memcpy(out, p_, len);
        p_ += len;
    }
    size_t remaining() const
    {
        return static_cast<size_t>(end_ - p_);
    }

private:
    void need(size_t len) const
    {
        if (static_cast<size_t>(end_ - p_) < len)
            throw std::runtime_error("truncated input");
    }

    const uint8_t* p_;
    const uint8_t* end_;
};

// Whole-file helpers. writeFileAtomic writes to a sibling temp file and
// renames it over the target.
std::vector<uint8_t> readFile(const std::string& path);
void writeFileAtomic(const std::string& path, const std::vector<uint8_t>& data);

}  // namespace hvp

#endif
