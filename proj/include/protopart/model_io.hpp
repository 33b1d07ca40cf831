// Copyright (c) protopart contributors.
// SPDX-License-Identifier: MIT
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "protopart/model.hpp"

namespace protopart {

class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Assertion {
    Channel channel;
    std::optional<bool> require_conf;
    std::optional<bool> require_intg;
    std::string message;
};

struct EnvAssumption {
    std::string instance;
    bool conf = false;
    bool intg = false;
};

/// Per-element data that has no meaning for the analysis but must survive a
/// round trip.
struct ElementExtras {
    std::string description;
    /// Element-level attributes other than id and the env guarantee flags
    /// (e.g. value, code).
    std::map<std::string, std::string> attributes;
    /// Local-port rule given inline; replaces the registry template.
    std::optional<RuleExpr> inline_rule;
};

struct ModelDocument {
    Network network;
    std::vector<EnvAssumption> env_assumptions;  // sorted by instance
    std::vector<Assertion> assertions;           // sorted by channel
    /// <config .../> attributes per instance (executor bindings).
    std::map<std::string, std::map<std::string, std::string>> exec_bindings;
    std::map<std::string, ElementExtras> extras;

    [[nodiscard]] const EnvAssumption* env_assumption(const std::string& instance) const;
};

/// Parses the XML model format.
///
///   <model name="...">
///     <KIND id="NAME" [value=".."] [code=".."] [confidentiality=".."] [integrity=".."]>
///       <description>...</description>
///       <rule>conf(x) &amp; intg(y)</rule>
///       <config key="value" .../>
///       <arg name="PORT"/>           input port of env/transform/custom kinds
///       <out name="PORT"/>           output port without a flow
///       <flow sarg="OUT" sink="DST" darg="IN">
///         <assert confidentiality="true" integrity="false">message</assert>
///       </flow>
///     </KIND>
///   </model>
///
/// Annotation attributes written by serialize_annotated (partition, conf,
/// intg, conflict) are accepted and ignored. Throws ParseError.
ModelDocument parse_model(std::string_view text);
ModelDocument load_model(const std::string& path);

/// Extra data written into a serialized model.
struct Annotations {
    const Assignment* assignment = nullptr;  // must be total when set
    const DomainSet* domains = nullptr;
    std::set<std::string> conflict_instances;
    std::set<Channel> conflict_channels;
};

/// Canonical form: instances sorted by name, two-space indent, LF endings.
/// With an assignment, every port reference carries conf/intg attributes;
/// with domains, every instance carries partition="Kn".
std::string serialize_annotated(const ModelDocument& doc, const Annotations& notes = {});
std::string serialize_annotated(const ModelDocument& doc, const Assignment& asg, const DomainSet& domains);

/// kind -> SLOC weight.
struct WeightTable {
    std::map<std::string, long> weights;
    std::vector<std::string> warnings;

    /// Weight for a kind; kinds absent from the table weigh 0.
    [[nodiscard]] long weight(const std::string& kind) const;
};

/// Calibration defaults; not measured data.
WeightTable default_weights();

/// "kind = integer" lines with '#' comments, applied over the defaults.
/// Unregistered kinds are skipped with a warning. Throws ParseError.
WeightTable parse_weights(std::string_view text);

std::string read_file(const std::string& path);

/// "true"/"false"; anything else throws ParseError.
bool parse_bool(std::string_view text, std::string_view what);

}  // namespace protopart
