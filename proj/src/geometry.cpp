#include "ggc/geometry.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <mutex>
#include <sstream>

namespace ggc {

namespace {
std::atomic<int> g_threads{0};
}

int thread_count()
{
    int n = g_threads.load();
    if (n > 0) return n;
    if (const char* env = std::getenv("GGC_THREADS")) {
        int e = std::atoi(env);
        if (e > 0) return e;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? int(hc) : 1;
}

void set_thread_count(int n) { g_threads.store(n); }

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& chunk_fn)
{
    int workers = thread_count();
    if (workers <= 1 || n < 64) {
        chunk_fn(0, n);
        return;
    }
    std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        std::size_t lo = std::size_t(w) * chunk;
        if (lo >= n) break;
        std::size_t hi = std::min(n, lo + chunk);
        pool.emplace_back([&, lo, hi] { chunk_fn(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

Fraction::Fraction(long long n, long long d) : num_(n), den_(d)
{
    if (d == 0) throw InvalidArgument("Fraction: zero denominator");
    reduce();
}

void Fraction::reduce()
{
    if (den_ < 0) {
        num_ = -num_;
        den_ = -den_;
    }
    long long g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
        num_ /= g;
        den_ /= g;
    }
    if (num_ == 0) den_ = 1;
}

Fraction Fraction::operator+(const Fraction& o) const
{
    return Fraction(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}
Fraction Fraction::operator-(const Fraction& o) const
{
    return Fraction(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
}
Fraction Fraction::operator*(const Fraction& o) const
{
    return Fraction(num_ * o.num_, den_ * o.den_);
}
std::string Fraction::str() const
{
    std::ostringstream os;
    os << num_;
    if (den_ != 1) os << "/" << den_;
    return os.str();
}

std::string point_str(const Point& p)
{
    std::ostringstream os;
    if (p.size() == 1) {
        os << p[0];
        return os.str();
    }
    os << "(";
    for (std::size_t i = 0; i < p.size(); ++i) os << (i ? "," : "") << p[i];
    os << ")";
    return os.str();
}

Point point_add(const Point& a, const Point& b)
{
    Point r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

Point point_sub(const Point& a, const Point& b)
{
    Point r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

Point point_scale(std::int64_t k, const Point& a)
{
    Point r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = k * a[i];
    return r;
}

bool lex_less(const Point& a, const Point& b)
{
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

GroupModel GroupModel::translation(int dim, std::vector<std::int64_t> moduli)
{
    GroupModel m;
    m.kind = GroupKind::TranslationLattice;
    m.dim = dim;
    if (!moduli.empty() && int(moduli.size()) != dim)
        throw InvalidArgument("GroupModel: moduli size mismatch");
    for (auto v : moduli)
        if (v != 0 && v < 2) throw InvalidArgument("GroupModel: modulus must be >= 2");
    m.moduli = std::move(moduli);
    return m;
}

GroupModel GroupModel::euclidean(int dim)
{
    GroupModel m;
    m.kind = GroupKind::EuclideanIsometry;
    m.dim = dim;
    return m;
}

bool GroupModel::modular() const
{
    for (auto v : moduli)
        if (v != 0) return true;
    return false;
}

Point GroupModel::canonicalize(const Point& p) const
{
    if (int(p.size()) != dim) throw InvalidArgument("point dimension mismatch");
    if (moduli.empty()) return p;
    Point r = p;
    for (int i = 0; i < dim; ++i) {
        if (moduli[i] > 0) {
            r[i] %= moduli[i];
            if (r[i] < 0) r[i] += moduli[i];
        }
    }
    return r;
}

bool OrbitKey::operator==(const OrbitKey& o) const
{
    if (is_offset != o.is_offset) return false;
    return is_offset ? offset == o.offset : sqdist == o.sqdist;
}

std::string OrbitKey::str() const
{
    if (is_offset) return "offset " + point_str(offset);
    return "sqdist " + std::to_string(sqdist);
}

std::size_t OrbitKeyHash::operator()(const OrbitKey& k) const
{
    if (!k.is_offset) return hash_combine(17, std::hash<std::int64_t>()(k.sqdist));
    return hash_combine(31, PointHash()(k.offset));
}

Domain::Domain(const GroupModel& model, std::vector<Point> points)
{
    for (auto& p : points) p = model.canonicalize(p);
    std::sort(points.begin(), points.end(), lex_less);
    points.erase(std::unique(points.begin(), points.end()), points.end());
    points_ = std::move(points);
    index_.reserve(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) index_[points_[i]] = int(i);
}

Domain Domain::box(const GroupModel& model, const Point& lo, const Point& hi)
{
    if (int(lo.size()) != model.dim || int(hi.size()) != model.dim)
        throw InvalidArgument("Domain::box: bounds dimension mismatch");
    std::vector<Point> pts;
    Point cur = lo;
    while (true) {
        pts.push_back(cur);
        int axis = model.dim - 1;
        while (axis >= 0) {
            if (++cur[axis] <= hi[axis]) break;
            cur[axis] = lo[axis];
            --axis;
        }
        if (axis < 0) break;
    }
    return Domain(model, std::move(pts));
}

Domain Domain::full_modular(const GroupModel& model)
{
    for (auto v : model.moduli)
        if (v == 0) throw InvalidArgument("full_modular: model has an infinite axis");
    if (model.moduli.empty()) throw InvalidArgument("full_modular: model is not modular");
    Point lo(model.dim, 0);
    Point hi(model.dim);
    for (int i = 0; i < model.dim; ++i) hi[i] = model.moduli[i] - 1;
    return box(model, lo, hi);
}

int Domain::index_of(const Point& p) const
{
    auto it = index_.find(p);
    if (it == index_.end()) throw InvalidArgument("point not in domain: " + point_str(p));
    return it->second;
}

OrbitKey class_of(const GroupModel& model, const Point& p, const Point& q)
{
    Point cp = model.canonicalize(p);
    Point cq = model.canonicalize(q);
    if (cp == cq) throw InvalidArgument("class_of: diagonal pair " + point_str(cp));
    OrbitKey key;
    if (model.kind == GroupKind::TranslationLattice) {
        key.is_offset = true;
        key.offset = model.canonicalize(point_sub(cp, cq));
    } else {
        key.is_offset = false;
        key.sqdist = 0;
        for (int i = 0; i < model.dim; ++i) {
            std::int64_t d = cp[i] - cq[i];
            key.sqdist += d * d;
        }
    }
    return key;
}

std::vector<std::pair<Point, Point>> class_members(const GroupModel& model, const Domain& domain,
                                                   const OrbitKey& key)
{
    std::vector<std::pair<Point, Point>> out;
    if (model.kind == GroupKind::TranslationLattice) {
        if (!key.is_offset) throw InvalidArgument("class_members: key kind mismatch");
        Point zero(model.dim, 0);
        if (model.canonicalize(key.offset) == zero)
            throw InvalidArgument("class_members: diagonal key");
        for (const auto& p : domain.points()) {
            Point q = model.canonicalize(point_sub(p, key.offset));
            if (domain.contains(q)) out.emplace_back(p, q);
        }
    } else {
        if (key.is_offset) throw InvalidArgument("class_members: key kind mismatch");
        if (key.sqdist <= 0) throw InvalidArgument("class_members: diagonal key");
        for (const auto& p : domain.points())
            for (const auto& q : domain.points()) {
                if (p == q) continue;
                std::int64_t d2 = 0;
                for (int i = 0; i < model.dim; ++i) {
                    std::int64_t d = p[i] - q[i];
                    d2 += d * d;
                }
                if (d2 == key.sqdist) out.emplace_back(p, q);
            }
    }
    return out;
}

std::vector<Point> neighbors_in_class(const GroupModel& model, const Domain& domain,
                                      const OrbitKey& key, const Point& p,
                                      const std::vector<Point>& support)
{
    std::vector<Point> out;
    for (const auto& q : support) {
        if (model.canonicalize(q) == model.canonicalize(p)) continue;
        if (class_of(model, p, q) == key || class_of(model, q, p) == key) out.push_back(q);
    }
    std::sort(out.begin(), out.end(), lex_less);
    return out;
}

ClassAdjacency::ClassAdjacency(const GroupModel& model, const Domain& domain, const OrbitKey& key,
                               const std::vector<Point>& support)
{
    lists_.resize(domain.size());
    slot_.reserve(domain.size());
    for (std::size_t i = 0; i < domain.size(); ++i) slot_[domain.point(i)] = int(i);

    if (model.kind == GroupKind::TranslationLattice) {
        // Only p +- offset can be class-related to p.
        std::unordered_map<Point, bool, PointHash> in_support;
        for (const auto& s : support) in_support[model.canonicalize(s)] = true;
        for (std::size_t i = 0; i < domain.size(); ++i) {
            const Point& p = domain.point(i);
            for (int sgn : {+1, -1}) {
                Point q = model.canonicalize(
                    sgn > 0 ? point_add(p, key.offset) : point_sub(p, key.offset));
                if (q != p && in_support.count(q)) lists_[i].push_back(q);
            }
            std::sort(lists_[i].begin(), lists_[i].end(), lex_less);
            lists_[i].erase(std::unique(lists_[i].begin(), lists_[i].end()), lists_[i].end());
        }
    } else {
        for (std::size_t i = 0; i < domain.size(); ++i) {
            const Point& p = domain.point(i);
            for (const auto& q : support) {
                if (q == p) continue;
                std::int64_t d2 = 0;
                for (int a = 0; a < model.dim; ++a) {
                    std::int64_t d = p[a] - q[a];
                    d2 += d * d;
                }
                if (d2 == key.sqdist) lists_[i].push_back(q);
            }
            std::sort(lists_[i].begin(), lists_[i].end(), lex_less);
        }
    }
}

const std::vector<Point>& ClassAdjacency::neighbors(const Point& p) const
{
    auto it = slot_.find(p);
    if (it == slot_.end()) return empty_;
    return lists_[it->second];
}

} // namespace ggc
