#include "hqva/harness/cache.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>

#include "hqva/exact/text.hpp"
#include "log.hpp"

namespace hqva::harness {

namespace fs = std::filesystem;

namespace {

constexpr const char* kMagic = "hqva-cache 1";

VarNames normalizer_names() {
    VarNames names;
    names.exp = {"z"};
    names.capped = {"h"};
    return names;
}

// flock on <dir>/.lock for the lifetime of the object.
class DirLock {
public:
    DirLock(const fs::path& dir, bool exclusive) {
        fs::create_directories(dir);
        const fs::path p = dir / ".lock";
        fd_ = ::open(p.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
        if (fd_ < 0) throw std::runtime_error("cannot open cache lock " + p.string());
        if (::flock(fd_, exclusive ? LOCK_EX : LOCK_SH) != 0) {
            ::close(fd_);
            throw std::runtime_error("cannot lock " + p.string());
        }
    }
    ~DirLock() {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }
    DirLock(const DirLock&) = delete;
    DirLock& operator=(const DirLock&) = delete;

private:
    int fd_ = -1;
};

std::vector<std::pair<std::string, const TensorOp*>> named_ops(const ConstantOps& ops) {
    return {{"P", &ops.P}, {"Q", &ops.Q}, {"R", &ops.R}, {"M", &ops.M}, {"Minv", &ops.Minv}};
}

std::string key_line(const CacheKey& key) {
    return std::string("key ") + family_letter(key.family) + " " + std::to_string(key.n) + " " +
           std::to_string(key.order) + " " + std::to_string(key.z_degree);
}

std::optional<CacheKey> key_from_file_name(const std::string& name) {
    CacheKey k;
    char f = 0;
    char tail[8] = {0};
    if (std::sscanf(name.c_str(), "%c%d_L%d_z%d%7s", &f, &k.n, &k.order, &k.z_degree, tail) != 5) return std::nullopt;
    if (std::string(tail) != ".hqc") return std::nullopt;
    try {
        k.family = parse_family(std::string(1, f));
    } catch (const std::exception&) {
        return std::nullopt;
    }
    if (k.file_name() != name) return std::nullopt;
    return k;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Splits "body digest <hex>\n" and checks the digest.
std::string verified_body(const std::string& text, std::string* digest) {
    const auto pos = text.rfind("digest ");
    if (pos == std::string::npos || (pos > 0 && text[pos - 1] != '\n')) throw std::invalid_argument("no digest line");
    std::string stored = text.substr(pos + 7);
    while (!stored.empty() && (stored.back() == '\n' || stored.back() == '\r')) stored.pop_back();
    std::string body = text.substr(0, pos);
    const std::string actual = sha256_hex(body);
    if (stored != actual) throw std::invalid_argument("digest mismatch");
    if (digest) *digest = actual;
    return body;
}

}  // namespace

std::string CacheKey::file_name() const {
    return std::string(1, family_letter(family)) + std::to_string(n) + "_L" + std::to_string(order) + "_z" +
           std::to_string(z_degree) + ".hqc";
}

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

fs::path default_cache_dir() {
    if (const char* d = std::getenv("HQVA_CACHE_DIR"); d && *d) return d;
    if (const char* x = std::getenv("XDG_CACHE_HOME"); x && *x) return fs::path(x) / "hqva";
    if (const char* h = std::getenv("HOME"); h && *h) return fs::path(h) / ".cache" / "hqva";
    return fs::temp_directory_path() / "hqva-cache";
}

std::string serialize_entry(const CacheKey& key, const Normalizer& nz) {
    const VarNames names = normalizer_names();
    std::string s = std::string(kMagic) + "\n" + key_line(key) + "\n";
    s += "kappa " + to_string(nz.ltd.kappa) + "\n";
    for (std::size_t l = 0; l < nz.g1.size(); ++l) {
        s += "g1 " + std::to_string(l) + " " + nz.g1[l].to_string(names) + "\n";
    }
    for (std::size_t l = 0; l < nz.denominator_power.size(); ++l) {
        s += "rpow " + std::to_string(l) + " " + std::to_string(nz.denominator_power[l]) + "\n";
    }
    for (std::size_t l = 0; l < nz.g1_series.size(); ++l) {
        s += "series " + std::to_string(l);
        for (const auto& c : nz.g1_series[l]) s += " " + to_string(c);
        s += "\n";
    }
    const ConstantOps ops = build_constant_ops(nz.ltd, nz.order);
    for (const auto& [name, op] : named_ops(ops)) {
        const std::string text = op->to_string();
        std::size_t lines = 0;
        for (char c : text) lines += c == '\n';
        s += "op " + name + " " + std::to_string(lines) + "\n" + text;
        if (!text.empty() && text.back() != '\n') s += "\n";
    }
    return s;
}

Normalizer parse_entry(const std::string& body, const CacheKey& key) {
    const VarNames names = normalizer_names();
    std::istringstream in(body);
    std::string line;
    auto next = [&](const char* what) {
        if (!std::getline(in, line)) throw std::invalid_argument(std::string("truncated entry before ") + what);
        return line;
    };
    if (next("header") != kMagic) throw std::invalid_argument("bad header");
    if (next("key") != key_line(key)) throw std::invalid_argument("key mismatch");

    Normalizer nz;
    nz.ltd = lie_type_data(key.family, key.n);
    nz.order = key.order;
    nz.z_degree = key.z_degree;
    if (next("kappa") != "kappa " + to_string(nz.ltd.kappa)) throw std::invalid_argument("kappa mismatch");

    auto field = [&](const std::string& tag, int l) {
        const std::string prefix = tag + " " + std::to_string(l);
        next(tag.c_str());
        if (line.rfind(prefix, 0) != 0) throw std::invalid_argument("expected " + prefix);
        const std::string rest = line.substr(prefix.size());
        return rest.empty() ? rest : rest.substr(1);
    };
    for (int l = 0; l < key.order; ++l) nz.g1.push_back(parse_ratfunc(field("g1", l), names));
    for (int l = 0; l < key.order; ++l) nz.denominator_power.push_back(std::stoi(field("rpow", l)));
    for (int l = 0; l < key.order; ++l) {
        std::istringstream row(field("series", l));
        std::vector<Rational> coeffs;
        std::string tok;
        while (row >> tok) coeffs.push_back(parse_rational(tok));
        if (static_cast<int>(coeffs.size()) != key.z_degree + 1) throw std::invalid_argument("series row length");
        nz.g1_series.push_back(std::move(coeffs));
    }

    // The digest only guards against accidental damage; the content is checked
    // against the coefficient recursion as well.
    const auto oracle = normalizer_series_oracle(nz.ltd, key.order, key.z_degree);
    for (int l = 0; l < key.order; ++l) {
        if (nz.g1_series[l] != oracle[l]) throw std::invalid_argument("series differs from the recursion at h^" + std::to_string(l));
        if (expand_at_zero(nz.g1[l], kZ, key.z_degree) != oracle[l]) {
            throw std::invalid_argument("rational form differs from the recursion at h^" + std::to_string(l));
        }
    }

    // Constant operators are recomputed and must match the stored text.
    const ConstantOps ops = build_constant_ops(nz.ltd, nz.order);
    for (const auto& [name, op] : named_ops(ops)) {
        next("operator");
        std::istringstream head(line);
        std::string tag, stored_name;
        std::size_t lines = 0;
        if (!(head >> tag >> stored_name >> lines) || tag != "op" || stored_name != name) {
            throw std::invalid_argument("expected operator " + name);
        }
        std::string text;
        for (std::size_t i = 0; i < lines; ++i) text += next("operator body") + "\n";
        std::string expected = op->to_string();
        if (!expected.empty() && expected.back() != '\n') expected += "\n";
        if (text != expected) throw std::invalid_argument("constant operator " + name + " differs");
    }
    if (std::getline(in, line)) throw std::invalid_argument("trailing data");
    return nz;
}

DiskCache::DiskCache(fs::path dir) : dir_(std::move(dir)) {}

std::optional<Normalizer> DiskCache::read(const CacheKey& key, std::string* digest, std::string* problem) const {
    const fs::path p = dir_ / key.file_name();
    std::string text;
    {
        DirLock lock(dir_, false);
        if (!fs::exists(p)) return std::nullopt;
        text = read_file(p);
    }
    try {
        return parse_entry(verified_body(text, digest), key);
    } catch (const std::exception& ex) {
        if (problem) *problem = ex.what();
        return std::nullopt;
    }
}

std::string DiskCache::write(const CacheKey& key, const Normalizer& normalizer) {
    const std::string body = serialize_entry(key, normalizer);
    const std::string digest = sha256_hex(body);
    DirLock lock(dir_, true);
    const fs::path target = dir_ / key.file_name();
    const fs::path tmp = dir_ / (key.file_name() + ".tmp." + std::to_string(::getpid()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << body << "digest " << digest << "\n";
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
    }
    fs::rename(tmp, target);
    return digest;
}

Normalizer DiskCache::load_or_solve(const CacheKey& key, bool* warned) {
    std::string problem;
    if (auto nz = read(key, nullptr, &problem)) return *nz;
    if (!problem.empty()) {
        log()->warn("cache entry {} rejected ({}); recomputing", key.file_name(), problem);
        if (warned) *warned = true;
    }
    Normalizer nz = solve_normalizer(lie_type_data(key.family, key.n), key.order, key.z_degree);
    write(key, nz);
    return nz;
}

std::string DiskCache::warm(const CacheKey& key) {
    std::string digest, problem;
    if (read(key, &digest, &problem)) return digest;
    if (!problem.empty()) log()->warn("cache entry {} rejected ({}); recomputing", key.file_name(), problem);
    return write(key, solve_normalizer(lie_type_data(key.family, key.n), key.order, key.z_degree));
}

int DiskCache::clear(const std::optional<CacheKey>& key) {
    if (!fs::exists(dir_)) return 0;
    DirLock lock(dir_, true);
    int removed = 0;
    for (const auto& e : fs::directory_iterator(dir_)) {
        const std::string name = e.path().filename().string();
        const auto k = key_from_file_name(name);
        const bool stale_tmp = name.find(".hqc.tmp.") != std::string::npos;
        if (stale_tmp || (k && (!key || *k == *key))) {
            fs::remove(e.path());
            removed += k ? 1 : 0;
        }
    }
    return removed;
}

std::vector<CacheEntryInfo> DiskCache::inspect() const {
    std::vector<CacheEntryInfo> out;
    if (!fs::exists(dir_)) return out;
    std::vector<CacheKey> keys;
    {
        DirLock lock(dir_, false);
        for (const auto& e : fs::directory_iterator(dir_)) {
            if (auto k = key_from_file_name(e.path().filename().string())) keys.push_back(*k);
        }
    }
    std::sort(keys.begin(), keys.end());
    for (const auto& k : keys) {
        CacheEntryInfo info;
        info.key = k;
        info.valid = read(k, &info.digest, &info.problem).has_value();
        if (!info.valid) info.digest.clear();
        out.push_back(std::move(info));
    }
    return out;
}

CachedRMatrixSource::CachedRMatrixSource(std::shared_ptr<DiskCache> cache) : cache_(std::move(cache)) {}

std::shared_ptr<const RMatrix> CachedRMatrixSource::get(Family family, int n, int order) {
    const auto key = std::make_tuple(family, n, order);
    std::promise<std::shared_ptr<const RMatrix>> promise;
    std::shared_future<std::shared_ptr<const RMatrix>> pending;
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = solved_.find(key);
        if (it != solved_.end()) {
            pending = it->second;
        } else {
            solved_.emplace(key, promise.get_future().share());
        }
    }
    if (pending.valid()) return pending.get();
    try {
        std::shared_ptr<const RMatrix> r;
        if (cache_) {
            r = std::make_shared<const RMatrix>(cache_->load_or_solve({family, n, order, 10}));
        } else {
            r = std::make_shared<const RMatrix>(solve_normalizer(lie_type_data(family, n), order));
        }
        promise.set_value(r);
        return r;
    } catch (...) {
        promise.set_exception(std::current_exception());
        std::lock_guard<std::mutex> lock(mutex_);
        solved_.erase(key);
        throw;
    }
}

}  // namespace hqva::harness
