// Content-addressed store for per-realization power spectra.
//
// Keys are SHA-256 digests of a canonical hex-float serialization of
// (FieldRealization, AtomSpec, NumericsSpec). Entries live in memory and,
// when a directory is configured, on disk as one binary file per key.
#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <thread>
#include <atomic>
#include <unordered_map>
#include <vector>

#include <openssl/evp.h>

#include "driver.hpp"
#include "error.hpp"
#include "sfa.hpp"

namespace sqhhg {

/// |d_par|^2 and |d_perp|^2 on the positive-frequency grid of one realization.
struct RealizationPower {
    std::vector<double> omegas;
    std::vector<double> p_par;
    std::vector<double> p_perp;
};

inline RealizationPower power_of(const DipoleSpectrum& d) {
    RealizationPower p;
    p.omegas = d.omegas;
    p.p_par.resize(d.omegas.size());
    p.p_perp.resize(d.omegas.size());
    for (std::size_t k = 0; k < d.omegas.size(); ++k) {
        p.p_par[k] = std::norm(d.d_par[k]);
        p.p_perp[k] = std::norm(d.d_perp[k]);
    }
    return p;
}

inline std::string sha256_hex(std::string_view data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw Error(ErrorKind::NumericalFault, "SHA-256 digest failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0xf]);
    }
    return out;
}

inline std::string hexfloat(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", x);
    return buf;
}

inline std::string canonical_serialization(const FieldRealization& r, const AtomSpec& atom, const NumericsSpec& num) {
    std::string s = "sqhhg-realization-v2";
    auto field = [&](const char* name, double v) {
        s += '|';
        s += name;
        s += '=';
        s += hexfloat(v);
    };
    field("omega", r.omega);
    field("eps_par_x", r.eps_par.real());
    field("eps_par_y", r.eps_par.imag());
    field("eps_perp_x", r.eps_perp.real());
    field("eps_perp_y", r.eps_perp.imag());
    field("Ip", atom.Ip);
    s += "|dipole=hydrogen1s";
    field("dt", num.dt);
    s += "|n_cycles=" + std::to_string(num.n_cycles);
    s += std::string("|window=") + to_string(num.window);
    field("epsilon_reg", num.epsilon_reg);
    field("excursion_cap", num.excursion_cap);
    return s;
}

inline std::string content_hash(const FieldRealization& r, const AtomSpec& atom, const NumericsSpec& num) {
    return sha256_hex(canonical_serialization(r, atom, num));
}

class SpectrumCache {
  public:
    using WarningSink = std::function<void(const std::string&)>;

    /// Memory-only cache when @p directory is empty.
    explicit SpectrumCache(std::filesystem::path directory = {}, WarningSink warn = {})
        : dir_(std::move(directory)), warn_(std::move(warn)) {
        if (!warn_) warn_ = [](const std::string& m) { std::cerr << "warning: " << m << '\n'; };
        if (!dir_.empty()) {
            std::error_code ec;
            std::filesystem::create_directories(dir_, ec);
            if (ec) throw Error(ErrorKind::Io, "cannot create cache directory " + dir_.string() + ": " + ec.message());
        }
    }

    std::shared_ptr<const RealizationPower> get(const std::string& key) {
        {
            std::shared_lock lock(mutex_);
            if (auto it = memory_.find(key); it != memory_.end()) return it->second;
        }
        if (dir_.empty()) return nullptr;
        auto loaded = read_file(path_for(key), key);
        if (!loaded) return nullptr;
        auto ptr = std::make_shared<const RealizationPower>(std::move(*loaded));
        std::unique_lock lock(mutex_);
        memory_[key] = ptr;
        return ptr;
    }

    void put(const std::string& key, RealizationPower value) {
        auto ptr = std::make_shared<const RealizationPower>(std::move(value));
        if (!dir_.empty()) write_file(path_for(key), *ptr);
        std::unique_lock lock(mutex_);
        memory_[key] = std::move(ptr);
    }

    std::size_t memory_entries() const {
        std::shared_lock lock(mutex_);
        return memory_.size();
    }

    const std::filesystem::path& directory() const { return dir_; }

  private:
    static constexpr char magic_[8] = {'S', 'Q', 'H', 'H', 'G', 'P', 'W', '1'};

    std::filesystem::path path_for(const std::string& key) const { return dir_ / (key + ".bin"); }

    static std::string payload_digest(const RealizationPower& p) {
        std::string bytes;
        for (const auto* v : {&p.omegas, &p.p_par, &p.p_perp})
            bytes.append(reinterpret_cast<const char*>(v->data()), v->size() * sizeof(double));
        return sha256_hex(bytes);
    }

    std::optional<RealizationPower> read_file(const std::filesystem::path& path, const std::string& key) {
        std::ifstream in(path, std::ios::binary);
        if (!in) return std::nullopt;
        auto corrupt = [&](const char* why) -> std::optional<RealizationPower> {
            warn_("corrupt cache entry " + path.string() + " (" + why + "), recomputing");
            return std::nullopt;
        };
        char magic[8];
        std::uint64_t n = 0;
        if (!in.read(magic, 8) || std::memcmp(magic, magic_, 8) != 0) return corrupt("bad header");
        if (!in.read(reinterpret_cast<char*>(&n), sizeof n) || n == 0 || n > (1u << 26)) return corrupt("bad length");
        RealizationPower p;
        for (auto* v : {&p.omegas, &p.p_par, &p.p_perp}) {
            v->resize(n);
            if (!in.read(reinterpret_cast<char*>(v->data()), static_cast<std::streamsize>(n * sizeof(double))))
                return corrupt("truncated");
        }
        char digest[64];
        if (!in.read(digest, 64)) return corrupt("missing digest");
        if (in.peek() != std::char_traits<char>::eof()) return corrupt("trailing bytes");
        if (std::string(digest, 64) != payload_digest(p)) return corrupt("digest mismatch");
        (void)key;
        return p;
    }

    void write_file(const std::filesystem::path& path, const RealizationPower& p) {
        // Unique temp name per thread; rename makes the last writer win.
        std::filesystem::path tmp = path;
        static std::atomic<unsigned long> counter{0};
        tmp += ".tmp." + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())) + "." +
               std::to_string(counter.fetch_add(1));
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) {
                warn_("cannot write cache entry " + tmp.string());
                return;
            }
            const std::uint64_t n = p.omegas.size();
            out.write(magic_, 8);
            out.write(reinterpret_cast<const char*>(&n), sizeof n);
            for (const auto* v : {&p.omegas, &p.p_par, &p.p_perp})
                out.write(reinterpret_cast<const char*>(v->data()), static_cast<std::streamsize>(n * sizeof(double)));
            const std::string digest = payload_digest(p);
            out.write(digest.data(), 64);
            if (!out) {
                warn_("short write on cache entry " + tmp.string());
                return;
            }
        }
        std::error_code ec;
        std::filesystem::rename(tmp, path, ec);
        if (ec) {
            warn_("cannot publish cache entry " + path.string() + ": " + ec.message());
            std::filesystem::remove(tmp, ec);
        }
    }

    std::filesystem::path dir_;
    WarningSink warn_;
    mutable std::shared_mutex mutex_;
    std::unordered_map<std::string, std::shared_ptr<const RealizationPower>> memory_;
};

} // namespace sqhhg
