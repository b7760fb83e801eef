#include "fundtone/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "fundtone/errors.hpp"

namespace fundtone {

namespace {

// Non-empty lines with comments stripped, tagged with their line number.
class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    bool next(std::istringstream& out) {
        std::string line;
        while (std::getline(in_, line)) {
            ++number_;
            if (const auto hash = line.find('#'); hash != std::string::npos) {
                line.erase(hash);
            }
            if (line.find_first_not_of(" \t\r") == std::string::npos) {
                continue;
            }
            out = std::istringstream(line);
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) const {
        std::ostringstream os;
        os << "OFF line " << number_ << ": " << what;
        throw IoError(os.str());
    }

private:
    std::istream& in_;
    int number_ = 0;
};

int infer_curvature(const Vec& x) {
    const double euclid = x.squaredNorm();
    const double minkowski = euclid - 2.0 * x[0] * x[0];
    if (std::abs(euclid - 1.0) <= 1e-6) {
        return 1;
    }
    if (std::abs(minkowski + 1.0) <= 1e-6 * euclid && x[0] > 0.0) {
        return -1;
    }
    throw IoError("four-coordinate OFF vertex lies neither on the unit sphere nor on the hyperboloid");
}

}  // namespace

TriMesh read_off(std::istream& in, std::optional<int> curvature) {
    LineReader lines(in);
    std::istringstream ls;
    if (!lines.next(ls)) {
        throw IoError("empty OFF input");
    }
    std::string header;
    ls >> header;
    if (header != "OFF") {
        lines.fail("expected header \"OFF\", got \"" + header + "\"");
    }
    long nv = -1;
    long nf = -1;
    if (!(ls >> nv)) {
        if (!lines.next(ls)) {
            throw IoError("OFF input ends before the counts line");
        }
        ls >> nv;
    }
    if (!(ls >> nf) || nv < 0 || nf < 0) {
        lines.fail("malformed counts line");
    }

    std::vector<Vec> coords;
    coords.reserve(nv);
    int width = 0;
    for (long v = 0; v < nv; ++v) {
        if (!lines.next(ls)) {
            throw IoError("OFF input ends after " + std::to_string(v) + " of " + std::to_string(nv) + " vertices");
        }
        std::vector<double> xs;
        double x;
        while (ls >> x) {
            xs.push_back(x);
        }
        if (!ls.eof()) {
            lines.fail("non-numeric vertex coordinate");
        }
        if (xs.size() != 3 && xs.size() != 4) {
            lines.fail("vertex needs 3 or 4 coordinates, got " + std::to_string(xs.size()));
        }
        if (width == 0) {
            width = static_cast<int>(xs.size());
        } else if (width != static_cast<int>(xs.size())) {
            lines.fail("vertices mix 3 and 4 coordinates");
        }
        for (double c : xs) {
            if (!std::isfinite(c)) {
                lines.fail("non-finite vertex coordinate");
            }
        }
        coords.push_back(Eigen::Map<const Vec>(xs.data(), static_cast<Eigen::Index>(xs.size())));
    }

    std::vector<Face> faces;
    faces.reserve(nf);
    for (long f = 0; f < nf; ++f) {
        if (!lines.next(ls)) {
            throw IoError("OFF input ends after " + std::to_string(f) + " of " + std::to_string(nf) + " faces");
        }
        int count = 0;
        Face t{};
        if (!(ls >> count)) {
            lines.fail("malformed face line");
        }
        if (count != 3) {
            lines.fail("only triangles are supported, got a " + std::to_string(count) + "-gon");
        }
        for (int& i : t) {
            if (!(ls >> i)) {
                lines.fail("malformed face line");
            }
        }
        faces.push_back(t);  // trailing tokens (colors) are ignored
    }

    int c = 0;
    if (width == 4) {
        c = curvature ? *curvature : infer_curvature(coords.front());
        if (c == 0) {
            throw IoError("Euclidean meshes take three coordinates per vertex");
        }
    } else if (curvature && *curvature != 0) {
        throw IoError("sphere and hyperbolic meshes take four coordinates per vertex");
    }
    const SpaceForm sf(c);
    std::vector<AmbientPoint> vertices;
    vertices.reserve(coords.size());
    for (std::size_t v = 0; v < coords.size(); ++v) {
        AmbientPoint p{coords[v]};
        if (c != 0) {
            const double q = sf.inner(p.coords, p.coords);
            if (std::abs(std::abs(q) - 1.0) > 1e-6 * std::max(1.0, p.coords.squaredNorm()) ||
                (c == -1 && p.coords[0] <= 0.0)) {
                throw IoError("vertex " + std::to_string(v) + " is not a point of the ambient model");
            }
            p = sf.project(p.coords);
        }
        vertices.push_back(std::move(p));
    }
    try {
        return TriMesh(sf, std::move(vertices), std::move(faces));
    } catch (const DomainError& e) {
        throw IoError(std::string("invalid OFF mesh: ") + e.what());
    }
}

TriMesh read_off_file(const std::filesystem::path& path, std::optional<int> curvature) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return read_off(in, curvature);
}

void write_off(std::ostream& out, const TriMesh& mesh) {
    out << "OFF\n" << mesh.num_vertices() << ' ' << mesh.num_faces() << ' ' << mesh.num_edges() << '\n';
    out << std::setprecision(17);
    for (const auto& v : mesh.vertices()) {
        for (Eigen::Index k = 0; k < v.coords.size(); ++k) {
            out << (k ? " " : "") << v.coords[k];
        }
        out << '\n';
    }
    for (const Face& f : mesh.faces()) {
        out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
    }
}

void write_off_file(const std::filesystem::path& path, const TriMesh& mesh) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    write_off(out, mesh);
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

void write_curvature_csv_file(const std::filesystem::path& path, const CurvatureField& cf) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    cf.write_csv(out);
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

}  // namespace fundtone
