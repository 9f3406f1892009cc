#include "pxg/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace pxg {

static_assert(std::endian::native == std::endian::little, "trace format assumes a little-endian host");

namespace {

class Writer {
public:
    explicit Writer(std::ostream& os) : os_(os) {}

    template <class T>
    void put(T v)
    {
        os_.write(reinterpret_cast<const char*>(&v), sizeof(T));
    }
    void matrix(const Matrix& m)
    {
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c) put<double>(m(r, c));
    }
    void vector(const Vector& v)
    {
        for (Eigen::Index i = 0; i < v.size(); ++i) put<double>(v(i));
    }

private:
    std::ostream& os_;
};

class Reader {
public:
    Reader(std::istream& is, std::string path) : is_(is), path_(std::move(path)) {}

    template <class T>
    T get()
    {
        T v{};
        is_.read(reinterpret_cast<char*>(&v), sizeof(T));
        if (!is_) fail("truncated file");
        return v;
    }
    Matrix matrix(Eigen::Index rows, Eigen::Index cols)
    {
        Matrix m(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = get<double>();
        return m;
    }
    Vector vector(Eigen::Index n)
    {
        Vector v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = get<double>();
        return v;
    }
    [[noreturn]] void fail(const std::string& what) const
    {
        throw FormatError("trace " + path_ + ": " + what);
    }
    std::istream& stream() { return is_; }

private:
    std::istream& is_;
    std::string path_;
};

} // namespace

void write_trace(const std::string& path, const TraceStore& trace)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot open " + path + " for writing");
    Writer w(os);
    os.write(kTraceMagic, sizeof(kTraceMagic));
    w.put<std::uint8_t>(kTraceVersion);
    w.put<std::uint8_t>(trace.backend == Backend::GWishart ? 0 : 1);
    w.put<std::uint64_t>(trace.config_hash);

    const int n = trace.n(), q = trace.q(), p = trace.data.p();
    w.put<std::int32_t>(n);
    w.put<std::int32_t>(q);
    w.put<std::int32_t>(p);
    w.matrix(trace.data.Y());
    w.matrix(trace.data.X());

    const Hyperparameters& h = trace.hyper;
    w.put<double>(h.alpha);
    w.put<double>(h.alpha_g);
    w.put<double>(h.gwishart.b);
    w.matrix(h.gwishart.D);
    w.put<double>(h.spike_slab.eta0);
    w.put<double>(h.spike_slab.eta1);
    w.put<double>(h.spike_slab.a1);
    w.put<double>(h.spike_slab.a2);
    w.vector(h.covariate.mu0);
    w.put<double>(h.covariate.sigma0sq);
    w.put<double>(h.covariate.b1);
    w.put<double>(h.covariate.b2);
    w.put<std::int32_t>(h.K);

    const SamplerOptions& o = trace.options;
    w.put<std::int32_t>(o.iterations);
    w.put<std::int32_t>(o.burn_in);
    w.put<std::int32_t>(o.thin);
    w.put<std::uint64_t>(o.seed);
    w.put<std::int32_t>(o.threads);
    w.put<std::int32_t>(o.mc_samples);
    w.put<std::int32_t>(o.dic_mc_samples);
    w.put<std::int32_t>(o.init_clusters);
    w.put<std::uint8_t>(o.record_dic);
    w.put<std::uint8_t>(o.single_cluster);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(o.allocation_likelihood));

    w.put<std::uint64_t>(trace.draws.size());
    for (const TraceDraw& d : trace.draws) {
        w.put<std::int64_t>(d.iteration);
        for (int zi : d.z) w.put<std::int32_t>(zi);
        w.put<std::int32_t>(static_cast<std::int32_t>(d.clusters.size()));
        w.vector(d.pi);
        for (const ClusterRecord& c : d.clusters) {
            for (int s = 0; s < q; ++s)
                for (int t = 0; t < q; ++t) w.put<std::uint8_t>(c.edges(s, t));
            w.matrix(c.params);
            w.vector(c.cov.mu);
            w.put<double>(c.cov.sigmasq);
        }
        w.put<double>(d.loglik_graph);
        w.put<double>(d.log_similarity);
    }
    if (!os) throw Error("write to " + path + " failed");
}

TraceStore read_trace(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InvalidArgument("cannot open trace " + path);
    Reader r(is, path);
    char magic[sizeof(kTraceMagic)];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kTraceMagic, sizeof(magic)) != 0) r.fail("not a PxG trace (bad magic)");
    const auto version = r.get<std::uint8_t>();
    if (version != kTraceVersion) {
        std::ostringstream os;
        os << "unsupported trace format version " << int(version) << " (this build reads version "
           << int(kTraceVersion) << ")";
        r.fail(os.str());
    }
    TraceStore t;
    const auto backend = r.get<std::uint8_t>();
    if (backend > 1) r.fail("unknown backend tag");
    t.backend = backend == 0 ? Backend::GWishart : Backend::Pseudo;
    t.config_hash = r.get<std::uint64_t>();

    const int n = r.get<std::int32_t>(), q = r.get<std::int32_t>(), p = r.get<std::int32_t>();
    if (n < 1 || q < 1 || p < 1 || n > (1 << 26) || q > (1 << 14) || p > (1 << 20)) r.fail("implausible dimensions");
    Matrix Y = r.matrix(n, q);
    Matrix X = r.matrix(n, p);
    t.data = Dataset(std::move(Y), std::move(X));

    Hyperparameters& h = t.hyper;
    h.alpha = r.get<double>();
    h.alpha_g = r.get<double>();
    h.gwishart.b = r.get<double>();
    h.gwishart.D = r.matrix(q, q);
    h.spike_slab.eta0 = r.get<double>();
    h.spike_slab.eta1 = r.get<double>();
    h.spike_slab.a1 = r.get<double>();
    h.spike_slab.a2 = r.get<double>();
    h.covariate.mu0 = r.vector(p);
    h.covariate.sigma0sq = r.get<double>();
    h.covariate.b1 = r.get<double>();
    h.covariate.b2 = r.get<double>();
    h.K = r.get<std::int32_t>();
    if (h.K < 1) r.fail("invalid truncation level");

    SamplerOptions& o = t.options;
    o.iterations = r.get<std::int32_t>();
    o.burn_in = r.get<std::int32_t>();
    o.thin = r.get<std::int32_t>();
    o.seed = r.get<std::uint64_t>();
    o.threads = r.get<std::int32_t>();
    o.mc_samples = r.get<std::int32_t>();
    o.dic_mc_samples = r.get<std::int32_t>();
    o.init_clusters = r.get<std::int32_t>();
    o.record_dic = r.get<std::uint8_t>() != 0;
    o.single_cluster = r.get<std::uint8_t>() != 0;
    o.allocation_likelihood = static_cast<AllocationLikelihood>(r.get<std::uint8_t>());

    const auto count = r.get<std::uint64_t>();
    if (count > static_cast<std::uint64_t>(o.iterations)) r.fail("draw count exceeds iterations");
    t.draws.reserve(count);
    for (std::uint64_t k = 0; k < count; ++k) {
        TraceDraw d;
        d.iteration = r.get<std::int64_t>();
        d.z.resize(n);
        for (int& zi : d.z) zi = r.get<std::int32_t>();
        const int K = r.get<std::int32_t>();
        if (K != h.K) r.fail("cluster count differs from the truncation level");
        for (int zi : d.z)
            if (zi < 0 || zi >= K) r.fail("allocation label out of range");
        d.pi = r.vector(K);
        d.clusters.resize(K);
        for (ClusterRecord& c : d.clusters) {
            c.edges = EdgeMatrix(q, q);
            for (int s = 0; s < q; ++s)
                for (int u = 0; u < q; ++u) c.edges(s, u) = r.get<std::uint8_t>();
            c.params = r.matrix(q, q);
            c.cov.mu = r.vector(p);
            c.cov.sigmasq = r.get<double>();
        }
        d.loglik_graph = r.get<double>();
        d.log_similarity = r.get<double>();
        t.draws.push_back(std::move(d));
    }
    if (is.peek() != std::char_traits<char>::eof()) r.fail("trailing bytes after the last draw");
    return t;
}

} // namespace pxg
