#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <type_traits>

#include "splice/error.hpp"

namespace splice::detail {

static_assert(std::endian::native == std::endian::little,
              "binary formats are little-endian; add byte swapping for this host");

class BinaryWriter {
  public:
    explicit BinaryWriter(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary)
    {
        if (!out_) {
            throw Error("cannot write '" + path.string() + "'");
        }
    }

    void bytes(const void* data, std::size_t n)
    {
        out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
    }

    template <typename T>
        requires std::is_trivially_copyable_v<T>
    void pod(const T& value)
    {
        bytes(&value, sizeof(T));
    }

    void string(std::string_view s)
    {
        pod(static_cast<std::uint32_t>(s.size()));
        bytes(s.data(), s.size());
    }

    void finish()
    {
        out_.flush();
        if (!out_) {
            throw Error("write failed for '" + path_.string() + "'");
        }
    }

  private:
    std::filesystem::path path_;
    std::ofstream out_;
};

class BinaryReader {
  public:
    explicit BinaryReader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary)
    {
        if (!in_) {
            throw Error("cannot open '" + path.string() + "'");
        }
    }

    void bytes(void* data, std::size_t n)
    {
        in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n) {
            throw Error("'" + path_.string() + "' is truncated");
        }
    }

    template <typename T>
        requires std::is_trivially_copyable_v<T>
    T pod()
    {
        T value;
        bytes(&value, sizeof(T));
        return value;
    }

    std::string string()
    {
        auto n = pod<std::uint32_t>();
        std::string s(n, '\0');
        bytes(s.data(), n);
        return s;
    }

    void expect_magic(std::string_view magic)
    {
        std::string got(magic.size(), '\0');
        in_.read(got.data(), static_cast<std::streamsize>(got.size()));
        if (static_cast<std::size_t>(in_.gcount()) != magic.size() || got != magic) {
            throw Error("'" + path_.string() + "' is not a " + std::string(magic) + " file");
        }
    }

    bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

    const std::filesystem::path& path() const { return path_; }

  private:
    std::filesystem::path path_;
    std::ifstream in_;
};

} // namespace splice::detail
