#include <aspui/ui_engine.hpp>

#include <aspui/errors.hpp>
#include <aspui/log.hpp>

#include <json.hpp>

#include <algorithm>
#include <array>
#include <map>
#include <optional>

namespace aspui {

namespace {

constexpr std::array<std::string_view, 10> widget_type_names{
    "window", "container", "menu_bar", "label", "button", "dropdown_menu", "dropdown_menu_item", "textfield", "modal",
    "message"};

// keys whose values accumulate instead of overriding each other
bool is_accumulating_key(Term const &key) { return key.is_constant() && key.name() == "class"; }

constexpr char const *concat_script = R"LUA(#script (lua)
function concat(...)
  local parts = {}
  for _, s in ipairs({...}) do
    if s.type == clingo.SymbolType.String then
      parts[#parts + 1] = s.string
    elseif s.type == clingo.SymbolType.Number then
      parts[#parts + 1] = tostring(s.number)
    else
      parts[#parts + 1] = tostring(s)
    end
  end
  return clingo.String(table.concat(parts))
end
#end.
)LUA";

/// Names of `@f` calls outside comments and strings.
std::set<std::string> external_calls(std::string_view text) {
    std::set<std::string> names;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == '%') {
            if (i + 1 < text.size() && text[i + 1] == '*') {
                auto end = text.find("*%", i + 2);
                i = end == std::string_view::npos ? text.size() : end + 2;
            } else {
                auto end = text.find('\n', i);
                i = end == std::string_view::npos ? text.size() : end;
            }
        } else if (c == '"') {
            ++i;
            while (i < text.size() && text[i] != '"') {
                i += text[i] == '\\' ? 2 : 1;
            }
            ++i;
        } else if (c == '#' && text.substr(i, 7) == "#script") {
            auto end = text.find("#end", i);
            i = end == std::string_view::npos ? text.size() : end + 4;
        } else if (c == '@') {
            std::size_t j = i + 1;
            while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
            names.emplace(text.substr(i + 1, j - i - 1));
            i = j;
        } else {
            ++i;
        }
    }
    return names;
}

bool is_ui_atom(Term const &t) {
    return t.is_function() && ((t.arity() == 3 && (t.name() == "elem" || t.name() == "attr")) ||
                               (t.arity() == 4 && t.name() == "when"));
}

struct ElementInfo {
    std::string type;
    Term parent;
    std::vector<UIAttribute> attributes;
    std::vector<UIHandler> when;
    std::vector<Term> children;
    std::optional<Term> order;
};

} // namespace

std::span<std::string_view const> widget_types() { return widget_type_names; }

AtomSet build_ui_atoms(ProgramBundle const &ui_files, std::string const &snapshot_facts, SolverBridge const &bridge) {
    if (ui_files.empty()) {
        return {};
    }
    bool uses_concat = false;
    for (auto const &part : ui_files.parts()) {
        for (auto const &name : external_calls(part.text)) {
            if (name != "concat") {
                throw GroundingError(part.label + ": unregistered external function @" + name);
            }
            uses_concat = true;
        }
    }
    ProgramBundle program = ui_files;
    program.add("<domain-state>", snapshot_facts);
    if (uses_concat) {
        if (!bridge.supports_scripting()) {
            throw GroundingError("@concat requires a solver with Lua support");
        }
        program.add("<ui-functions>", concat_script);
    }
    Query q{{}, SolveMode::models(2)};
    auto outcome = bridge.solve_all(program, {}, std::span<Query const>(&q, 1)).front();
    if (outcome.status == SolveStatus::Error) {
        throw SolveFailed("UI solve failed: " + to_string(outcome.diagnostics));
    }
    if (outcome.status == SolveStatus::Unsat) {
        throw NoUIModel("the UI encoding has no stable model");
    }
    if (outcome.models.size() > 1) {
        log::warning("the UI encoding has more than one stable model; using the first");
    }
    AtomSet atoms;
    for (auto const &a : outcome.models.front()) {
        if (is_ui_atom(a)) {
            atoms.insert(a);
        }
    }
    return atoms;
}

Term evaluate_external_concat(std::span<Term const> args) {
    std::string out;
    for (auto const &a : args) {
        out += a.is_string() ? a.name() : render_term(a);
    }
    return Term::string(std::move(out));
}

UINode assemble_tree(AtomSet const &atoms) {
    auto const root = Term::constant("root");
    std::map<Term, ElementInfo> elements;

    for (auto const &a : atoms) {
        if (!a.is_function() || a.name() != "elem" || a.arity() != 3) continue;
        auto id = a.args()[0];
        auto type = a.args()[1];
        if (!type.is_constant() ||
            std::find(widget_type_names.begin(), widget_type_names.end(), type.name()) == widget_type_names.end()) {
            throw UnknownWidgetType("unknown widget type " + render_term(type) + " for element " + render_term(id));
        }
        if (id == root) {
            throw DuplicateId("element id root is reserved");
        }
        auto [it, inserted] = elements.try_emplace(id, ElementInfo{type.name(), a.args()[2], {}, {}, {}, {}});
        if (!inserted) {
            throw DuplicateId("element " + render_term(id) + " is declared more than once");
        }
    }

    // 0 = unvisited, 1 = on the current path, 2 = attached to root, 3 = detached
    std::map<Term, int> state;
    for (auto const &[id, info] : elements) {
        std::vector<Term> path;
        Term cur = id;
        int outcome = 0;
        for (;;) {
            if (cur == root) {
                outcome = 2;
                break;
            }
            auto s = state[cur];
            if (s == 1) {
                std::string text;
                auto from = std::find(path.begin(), path.end(), cur);
                for (auto p = from; p != path.end(); ++p) {
                    text += render_term(*p) + " -> ";
                }
                throw CycleError("parent cycle: " + text + render_term(cur));
            }
            if (s >= 2) {
                outcome = s;
                break;
            }
            auto it = elements.find(cur);
            if (it == elements.end()) {
                log::warning("element " + render_term(path.back()) + " has unknown parent " + render_term(cur) +
                             " and is dropped");
                outcome = 3;
                break;
            }
            state[cur] = 1;
            path.push_back(cur);
            cur = it->second.parent;
        }
        for (auto const &p : path) {
            state[p] = outcome;
        }
    }
    std::erase_if(elements, [&](auto const &e) { return state[e.first] != 2; });

    for (auto const &[id, info] : elements) {
        if (info.type == "dropdown_menu_item") {
            auto parent = elements.find(info.parent);
            if (parent == elements.end() || parent->second.type != "dropdown_menu") {
                throw TreeError("dropdown_menu_item " + render_term(id) + " must be a child of a dropdown_menu");
            }
        }
    }

    for (auto const &a : atoms) {
        if (!a.is_function() || a.name() != "attr" || a.arity() != 3) continue;
        auto it = elements.find(a.args()[0]);
        if (it == elements.end()) {
            log::warning("dropping " + render_term(a) + ": no such element");
            continue;
        }
        auto &attrs = it->second.attributes;
        UIAttribute attr{a.args()[1], a.args()[2]};
        // atoms arrive sorted, so equal keys are adjacent and the last value wins
        if (!attrs.empty() && attrs.back().key == attr.key && !is_accumulating_key(attr.key)) {
            log::warning("element " + render_term(it->first) + " has several values for " + render_term(attr.key) +
                         "; using " + render_term(attr.value));
            attrs.back() = attr;
        } else {
            attrs.push_back(attr);
        }
    }

    for (auto const &a : atoms) {
        if (!a.is_function() || a.name() != "when" || a.arity() != 4) continue;
        auto it = elements.find(a.args()[0]);
        if (it == elements.end()) {
            log::warning("dropping " + render_term(a) + ": no such element");
            continue;
        }
        auto const &action = a.args()[2];
        auto const &operand = a.args()[3];
        if (!action.is_constant() || (action.name() != "call" && action.name() != "update" && action.name() != "context")) {
            throw TreeError("unknown action " + render_term(action) + " in " + render_term(a));
        }
        if (action.name() == "update") {
            if (!operand.is_tuple() || operand.arity() != 3) {
                throw TreeError("update expects (element,key,value) in " + render_term(a));
            }
            if (!elements.contains(operand.args()[0])) {
                throw TreeError("update target " + render_term(operand.args()[0]) + " does not exist");
            }
        } else if (action.name() == "context" && (!operand.is_tuple() || operand.arity() != 2)) {
            throw TreeError("context expects (key,value) in " + render_term(a));
        }
        it->second.when.push_back({a.args()[1], action.name(), operand});
    }

    std::map<Term, std::vector<Term>> children;
    for (auto &[id, info] : elements) {
        for (auto const &attr : info.attributes) {
            if (attr.key.is_constant() && attr.key.name() == "order") {
                info.order = attr.value;
            }
        }
        children[info.parent].push_back(id);
    }
    for (auto &[parent, ids] : children) {
        std::stable_sort(ids.begin(), ids.end(), [&](Term const &a, Term const &b) {
            auto const &oa = elements.at(a).order;
            auto const &ob = elements.at(b).order;
            if (oa.has_value() != ob.has_value()) {
                return oa.has_value();
            }
            if (oa && *oa != *ob) {
                return *oa < *ob;
            }
            return a < b;
        });
    }

    auto build = [&](auto &self, Term const &id, ElementInfo &info) -> UINode {
        UINode node{id, info.type, std::move(info.attributes), std::move(info.when), {}};
        for (auto const &child : children[id]) {
            node.children.push_back(self(self, child, elements.at(child)));
        }
        return node;
    };
    UINode tree{root, "root", {}, {}, {}};
    for (auto const &child : children[root]) {
        tree.children.push_back(build(build, child, elements.at(child)));
    }
    return tree;
}

namespace {

nlohmann::ordered_json to_json(UINode const &node) {
    nlohmann::ordered_json j;
    j["id"] = render_term(node.id);
    j["type"] = node.type;
    j["attributes"] = nlohmann::ordered_json::array();
    for (auto const &a : node.attributes) {
        nlohmann::ordered_json e;
        e["key"] = render_term(a.key);
        e["value"] = render_term(a.value);
        j["attributes"].push_back(std::move(e));
    }
    j["when"] = nlohmann::ordered_json::array();
    for (auto const &h : node.when) {
        nlohmann::ordered_json e;
        e["event"] = render_term(h.event);
        e["action"] = h.action;
        e["operand"] = render_term(h.operand);
        j["when"].push_back(std::move(e));
    }
    j["children"] = nlohmann::ordered_json::array();
    for (auto const &c : node.children) {
        j["children"].push_back(to_json(c));
    }
    return j;
}

std::string const &field(nlohmann::json const &j, char const *key) {
    if (!j.is_object() || !j.contains(key) || !j[key].is_string()) {
        throw ProtocolError(std::string("missing string field '") + key + "'");
    }
    return j[key].get_ref<std::string const &>();
}

nlohmann::json const &array_field(nlohmann::json const &j, char const *key) {
    if (!j.contains(key) || !j[key].is_array()) {
        throw ProtocolError(std::string("missing array field '") + key + "'");
    }
    return j[key];
}

Term term_field(nlohmann::json const &j, char const *key) {
    try {
        return parse_term(field(j, key));
    } catch (SyntaxError const &e) {
        throw ProtocolError(std::string("field '") + key + "': " + e.what());
    }
}

UINode from_json(nlohmann::json const &j) {
    UINode node;
    node.id = term_field(j, "id");
    node.type = field(j, "type");
    for (auto const &a : array_field(j, "attributes")) {
        node.attributes.push_back({term_field(a, "key"), term_field(a, "value")});
    }
    for (auto const &h : array_field(j, "when")) {
        node.when.push_back({term_field(h, "event"), field(h, "action"), term_field(h, "operand")});
    }
    for (auto const &c : array_field(j, "children")) {
        node.children.push_back(from_json(c));
    }
    return node;
}

} // namespace

std::string serialize_tree(UINode const &tree) {
    return to_json(tree).dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
}

UINode parse_tree(std::string_view json) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json);
    } catch (nlohmann::json::exception const &e) {
        throw ProtocolError(std::string("invalid JSON: ") + e.what());
    }
    return from_json(j);
}

} // namespace aspui
