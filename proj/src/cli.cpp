#include "stripes/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "stripes/dsl.hpp"
#include "stripes/error.hpp"
#include "stripes/foliation.hpp"
#include "stripes/surface_graph.hpp"
#include "stripes/vankampen.hpp"

namespace stripes {

namespace {

using nlohmann::json;

struct Style {
    bool color;
    std::string good(const std::string& s) const { return color ? "\033[32m" + s + "\033[0m" : s; }
    std::string bad(const std::string& s) const { return color ? "\033[31m" + s + "\033[0m" : s; }
    std::string verdict(bool ok, const std::string& yes, const std::string& no) const {
        return ok ? good(yes) : bad(no);
    }
};

template <class T>
std::string list_text(const std::vector<T>& xs) {
    std::string s = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + std::to_string(xs[i]);
    return s + "]";
}

std::string position(const std::string& path, const StripedAtlas& atlas, const std::vector<std::string>& keys) {
    for (const std::string& k : keys) {
        const auto it = atlas.spans.find(k);
        if (it != atlas.spans.end()) {
            return path + ":" + std::to_string(it->second.line) + ":" + std::to_string(it->second.column);
        }
    }
    return path;
}

class Session {
public:
    Session(const CliConfig& cfg, std::ostream& out, std::ostream& err)
        : cfg_(cfg), out_(out), err_(err), style_{cfg.color && cfg.format == "text"} {}

    int run() {
        std::ifstream in(cfg_.input, std::ios::binary);
        if (!in) {
            err_ << "stripes: cannot read " << cfg_.input << "\n";
            return exit_code::input;
        }
        std::stringstream buf;
        buf << in.rdbuf();
        ParseResult parsed = parse(buf.str());
        if (!parsed.ok()) {
            for (const ParseError& e : parsed.errors) err_ << format_error(e, cfg_.input) << "\n";
            return exit_code::input;
        }
        atlas_ = std::move(*parsed.atlas);
        try {
            expanded_ = expand(atlas_, cfg_.window);
        } catch (const Error& e) {
            err_ << cfg_.input << ": " << e.what() << "\n";
            return exit_code::input;
        }
        report_ = validate(expanded_);

        try {
            if (cfg_.command == "validate") return validate_cmd();
            if (cfg_.command == "leaves") return leaves_cmd();
            if (!report_.valid()) return invalid();
            if (cfg_.command == "invariants") return invariants_cmd();
            if (cfg_.command == "graph") return graph_cmd();
            if (cfg_.command == "verify") return verify_cmd();
        } catch (const Error& e) {
            err_ << cfg_.input << ": " << e.what() << "\n";
            return exit_code::failure;
        }
        err_ << "stripes: unknown command " << cfg_.command << "\n";
        return exit_code::input;
    }

private:
    bool json_out() const { return cfg_.format == "json"; }

    void emit(const json& j) { out_ << j.dump(2) << "\n"; }

    json violations_json() const {
        json arr = json::array();
        for (const Violation& v : report_.violations) {
            arr.push_back({{"kind", kind_name(v.kind)},
                           {"message", v.message},
                           {"at", position(cfg_.input, atlas_, v.span_keys)}});
        }
        return arr;
    }

    json dropped_json() const {
        json arr = json::array();
        for (const DroppedGluing& d : expanded_.dropped) {
            arr.push_back({{"gluing", d.source_id}, {"member", d.member}, {"reason", d.reason}});
        }
        return arr;
    }

    void print_violations() {
        for (const Violation& v : report_.violations) {
            err_ << position(cfg_.input, atlas_, v.span_keys) << ": " << style_.bad("error") << ": "
                 << kind_name(v.kind) << ": " << v.message << "\n";
        }
    }

    int invalid() {
        if (json_out()) {
            emit({{"valid", false}, {"violations", violations_json()}});
        }
        print_violations();
        return exit_code::failure;
    }

    int validate_cmd() {
        const bool ok = report_.valid();
        if (json_out()) {
            emit({{"valid", ok},
                  {"window", cfg_.window},
                  {"strips", expanded_.strips.size()},
                  {"gluings", expanded_.gluings.size()},
                  {"dropped", dropped_json()},
                  {"violations", violations_json()}});
        } else {
            out_ << cfg_.input << ": " << style_.verdict(ok, "valid", "invalid") << " (" << expanded_.strips.size()
                 << " strips, " << expanded_.gluings.size() << " gluings, window " << cfg_.window << ")\n";
            for (const DroppedGluing& d : expanded_.dropped) {
                out_ << "note: " << d.source_id << "[" << d.member << "] dropped: " << d.reason << "\n";
            }
        }
        print_violations();
        return ok ? exit_code::ok : exit_code::failure;
    }

    int invariants_cmd() {
        const SurfaceGraph g = build_graph(expanded_);
        const GraphInvariants inv = graph_invariants(g);
        const bool orient = orientable(expanded_);
        std::vector<std::int64_t> ranks;
        for (const ComponentInfo& c : inv.components) ranks.push_back(c.rank);
        if (json_out()) {
            emit({{"vertices", g.vertex_count()},
                  {"edges", g.edge_count()},
                  {"components", inv.components.size()},
                  {"euler", inv.euler},
                  {"ranks", ranks},
                  {"total_rank", inv.total_rank},
                  {"orientable", orient}});
            return exit_code::ok;
        }
        out_ << "vertices: " << g.vertex_count() << "\n"
             << "edges: " << g.edge_count() << "\n"
             << "components: " << inv.components.size() << "\n"
             << "euler characteristic: " << inv.euler << "\n"
             << "ranks: " << list_text(ranks) << "\n"
             << "orientable: " << (orient ? "yes" : "no") << "\n";
        return exit_code::ok;
    }

    int graph_cmd() {
        const SurfaceGraph g = build_graph(expanded_);
        const std::string dot = to_dot(g);
        if (!cfg_.dot_path.empty()) {
            std::ofstream f(cfg_.dot_path, std::ios::binary);
            f << dot;
            if (!f) {
                err_ << "stripes: cannot write " << cfg_.dot_path << "\n";
                return exit_code::input;
            }
        }
        if (json_out()) {
            json edges = json::array();
            for (const GraphEdge& e : g.edges()) {
                edges.push_back({{"id", e.id}, {"from", g.vertices()[e.from]}, {"to", g.vertices()[e.to]}});
            }
            emit({{"vertices", g.vertices()}, {"edges", edges}});
        } else if (cfg_.dot_path.empty()) {
            out_ << dot;
        } else {
            out_ << "wrote " << cfg_.dot_path << " (" << g.vertex_count() << " vertices, " << g.edge_count()
                 << " edges)\n";
        }
        return exit_code::ok;
    }

    int verify_cmd() {
        const VerificationReport rep = verify_phi_iso(expanded_, cfg_.max_word_length);
        if (json_out()) {
            emit(rep.to_json());
        } else {
            out_ << "isomorphism: " << style_.verdict(rep.confirmed, "confirmed", "NOT confirmed") << "\n"
                 << "objects: " << rep.graph_objects << " graph, " << rep.surface_objects << " surface\n"
                 << "ranks: " << list_text(rep.graph_ranks) << " graph, " << list_text(rep.surface_ranks)
                 << " surface\n"
                 << "euler characteristic: " << rep.graph_euler << " graph, " << rep.cover_graph_euler
                 << " cover graph\n"
                 << "words up to length " << rep.max_word_length << ": " << rep.words_checked << ", pairs: "
                 << rep.pairs_checked << "\n";
            for (const auto& [name, ok] : rep.checks) {
                out_ << "  " << name << ": " << style_.verdict(ok, "ok", "FAILED") << "\n";
            }
            for (const std::string& w : rep.witnesses) out_ << "witness: " << w << "\n";
        }
        return rep.confirmed ? exit_code::ok : exit_code::failure;
    }

    int leaves_cmd() {
        if (!report_.valid()) {
            // The symbolic certificate needs no window, so report it anyway.
            const FinitenessCertificate cert = local_finiteness(atlas_);
            if (json_out()) {
                emit({{"valid", false}, {"violations", violations_json()}, {"certificate", cert.to_json()}});
            } else {
                print_certificate(cert);
            }
            print_violations();
            return exit_code::failure;
        }
        const SingularReport rep = singular_report(expanded_);
        if (json_out()) {
            emit(rep.to_json());
        } else {
            out_ << "singular leaves: " << rep.leaves.size() << "\n";
            for (const SingularLeaf& l : rep.leaves) {
                std::vector<std::string> why;
                if (l.cls.is_seam) why.emplace_back("seam");
                if (l.cls.shares_side) why.emplace_back("shares side");
                out_ << "  " << l.name << ": " << why.front() << (why.size() > 1 ? ", " + why.back() : "") << "\n";
            }
            print_certificate(rep.certificate);
        }
        return rep.certificate.locally_finite ? exit_code::ok : exit_code::failure;
    }

    void print_certificate(const FinitenessCertificate& cert) {
        out_ << "certificate: " << style_.verdict(cert.locally_finite, "locally finite", "NOT locally finite") << "\n";
        for (const std::string& n : cert.notes) out_ << "  " << n << "\n";
    }

    const CliConfig& cfg_;
    std::ostream& out_;
    std::ostream& err_;
    Style style_;
    StripedAtlas atlas_;
    ExpandedAtlas expanded_;
    ValidationReport report_;
};

}  // namespace

int run(const CliConfig& config, std::ostream& out, std::ostream& err) {
    return Session(config, out, err).run();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Striped surfaces: validation, graph invariants and groupoid verification", "stripes"};
    app.require_subcommand(1, 1);
    CliConfig cfg;
    cfg.color = std::getenv("STRIPES_NO_COLOR") == nullptr;

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"validate", "parse, expand and check the atlas axioms"},
        {"invariants", "components, Euler characteristic, ranks and orientability"},
        {"graph", "graph of the atlas as DOT"},
        {"verify", "check that the canonical injection induces a groupoid isomorphism"},
        {"leaves", "singular leaves and the local-finiteness certificate"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("file", cfg.input, "atlas in .stripe format")->required();
        sub->add_option("--window", cfg.window, "family window W: members -W..W-1")
            ->check(CLI::NonNegativeNumber)
            ->capture_default_str();
        sub->add_option("--max-word-len", cfg.max_word_length, "longest word checked by verify")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        sub->add_option("--format", cfg.format, "output format")
            ->check(CLI::IsMember({"text", "json"}))
            ->capture_default_str();
        sub->add_option("--dot", cfg.dot_path, "write the graph in DOT format to this path");
        sub->callback([&cfg, name = name] { cfg.command = name; });
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();
    try {
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_code::ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_code::ok;
    } catch (const CLI::ParseError& e) {
        err << "stripes: " << e.what() << "\n";
        return exit_code::input;
    }
    return run(cfg, out, err);
}

}  // namespace stripes
