#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ga::prompts {

inline constexpr std::string_view kSystemText =
    "You are an expert reasoning over a knowledge graph.";

inline constexpr std::string_view kInductiveInstruction =
    "Given the provided examples and your existing knowledge, identify reasons why example "
    "nodes are categorized as labeled or why a connection exists in example edges. List the "
    "reasons concisely.";

inline constexpr std::string_view kNodeQuestion =
    "Given the reasons and examples, determine the type of {node_a} from the following "
    "options: [{options}], think step by step then choose one of the options";

inline constexpr std::string_view kLinkQuestion =
    "Considering the reasons and examples, does a connection exist between {node_a} and "
    "{node_b}? think step by step, and choose either TRUE or FALSE.";

// Simple-ask variants drop the reference to reasons and examples.
inline constexpr std::string_view kSimpleAskNodeQuestion =
    "Determine the type of {node_a} from the following options: [{options}], think step by "
    "step then choose one of the options";

inline constexpr std::string_view kSimpleAskLinkQuestion =
    "Does a connection exist between {node_a} and {node_b}? think step by step, and choose "
    "either TRUE or FALSE.";

// Replaces every "{key}" with its value. Unknown placeholders are left as-is.
inline std::string substitute(std::string_view tmpl,
                              const std::vector<std::pair<std::string, std::string>>& values) {
    std::string out(tmpl);
    for (const auto& [key, value] : values) {
        const std::string needle = "{" + key + "}";
        size_t pos = 0;
        while ((pos = out.find(needle, pos)) != std::string::npos) {
            out.replace(pos, needle.size(), value);
            pos += value.size();
        }
    }
    return out;
}

} // namespace ga::prompts
