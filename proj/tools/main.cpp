#include <CLI11.hpp>

#include <iostream>
#include <toricadelic/io.hpp>

using namespace toricadelic;

namespace {

struct Options {
    std::string format = "text";
    std::string out;
    long points = 65536;
    long length = 10;
    long n_max = 5;
};

std::string flatten_csv(const ojson& j) {
    std::string s = "field,value\n";
    std::function<void(const ojson&, const std::string&)> walk = [&](const ojson& v, const std::string& path) {
        if (v.is_object()) {
            for (auto it = v.begin(); it != v.end(); ++it) walk(it.value(), path.empty() ? it.key() : path + "." + it.key());
        } else if (v.is_array()) {
            for (size_t i = 0; i < v.size(); ++i) walk(v[i], path + "[" + std::to_string(i) + "]");
        } else {
            s += csv_field(path) + "," + csv_field(v.is_string() ? v.get<std::string>() : v.dump()) + "\n";
        }
    };
    walk(j, "");
    return s;
}

std::string render(const ojson& j, const std::string& format) {
    if (format == "structured") return dump(j);
    if (format == "csv") return flatten_csv(j);
    return text(j);
}

void emit(const std::string& s, const Options& o) {
    if (o.out.empty()) {
        std::cout << s;
        return;
    }
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw parse_error(o.out + ": cannot write file");
    f << s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact toric adelic divisor toolkit"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "csv", "structured"}));
    app.add_option("--out", o.out, "Write output to this file");
    app.add_option("--quadrature-points", o.points, "Torus sample points for Mahler measures")->check(CLI::Range(16L, 1L << 24));
    app.add_option("--length", o.length, "Sequence length for demo")->check(CLI::Range(1L, 100000L));
    app.add_option("--nmax", o.n_max, "Largest n in the approximation table")->check(CLI::Range(0L, 1000L));

    std::string file, along, poly;
    std::vector<std::string> files;
    std::vector<long> semiab;

    auto* analyze = app.add_subcommand("analyze", "Roofs, minima, volumes, positivity and the Zhang check");
    analyze->add_option("file", file, "Divisor file")->required();
    auto* normalize = app.add_subcommand("normalize", "Print the normalized divisor file");
    normalize->add_option("file", file, "Divisor file")->required();
    auto* equidist = app.add_subcommand("equidist", "Wideness, balanced sup-gradients, measures, derivatives");
    equidist->add_option("file", file, "Divisor file")->required();
    equidist->add_option("--along", along, "Direction divisor for the derivative");
    equidist->add_option("--poly", poly, "Laurent polynomial for the Gauss-Mahler measure");
    auto* intersect = app.add_subcommand("intersect", "Arithmetic intersection number of d+1 divisors");
    intersect->add_option("files", files, "Divisor files")->required();
    auto* dynamics = app.add_subcommand("dynamics", "Index set, derivative formula, approximation table");
    dynamics->add_option("file", file, "Dynamical data file");
    dynamics->add_option("--semiab", semiab, "r g l of a semiabelian variety")->expected(3);
    auto* demo = app.add_subcommand("demo", "Height convergence along a small sequence on P^1");
    demo->add_option("file", file, "Divisor file")->required();
    demo->add_option("--along", along, "Direction divisor (default: canonical)");
    for (auto* s : {analyze, normalize, equidist, intersect, dynamics, demo}) s->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return e.get_exit_code() == 0 ? app.exit(e) : (app.exit(e), 2);
    }

    try {
        if (*analyze) {
            emit(render(analyze_report(load_divisor(file)), o.format), o);
        } else if (*normalize) {
            emit(dump(divisor_json(load_divisor(file))), o);
        } else if (*equidist) {
            EquidistOptions eo;
            eo.points = o.points;
            if (!along.empty()) eo.along = load_divisor(along);
            if (!poly.empty()) eo.poly = poly;
            emit(render(equidist_report(load_divisor(file), eo), o.format), o);
        } else if (*intersect) {
            std::vector<ToricAdelicDivisor> Ds;
            for (auto& f : files) Ds.push_back(load_divisor(f));
            ojson j;
            j["intersection"] = io::number(intersection_number(Ds));
            emit(render(j, o.format), o);
        } else if (*dynamics) {
            DynamicalData data;
            std::optional<Q> mu_abs;
            long n_max = o.n_max;
            if (!semiab.empty()) {
                data = semiabelian(semiab[0], semiab[1], semiab[2]);
            } else if (!file.empty()) {
                data = dynamical_input(io::parse_text(io::read_file(file), file), &n_max, &mu_abs);
                if (app.get_option("--nmax")->count()) n_max = o.n_max;
            } else {
                throw parse_error("dynamics needs a file or --semiab r g l");
            }
            emit(render(dynamics_report(data, n_max, mu_abs), o.format), o);
        } else if (*demo) {
            ToricAdelicDivisor D = load_divisor(file);
            ToricAdelicDivisor E = along.empty() ? canonical_like(D) : load_divisor(along);
            Experiment ex = convergence_experiment(D, E, o.length);
            emit(o.format == "csv" ? demo_csv(ex) : render(demo_report(ex), o.format), o);
        }
    } catch (const parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const poly_parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const semantic_error& e) {
        std::cerr << "semantic error: " << e.what() << "\n";
        return 3;
    } catch (const geometry_error& e) {
        std::cerr << "semantic error: " << e.what() << "\n";
        return 3;
    } catch (const precondition_error& e) {
        std::cerr << "precondition violated: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
