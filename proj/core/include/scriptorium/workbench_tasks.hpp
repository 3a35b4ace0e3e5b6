// core/include/scriptorium/workbench_tasks.hpp

// Copyright 2024-2026  The scriptorium authors

// See LICENSE at the top of the source tree.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "scriptorium/lemmatizer.hpp"
#include "scriptorium/recognizer.hpp"
#include "scriptorium/tei.hpp"
#include "scriptorium/workbench.hpp"

// The module calls behind each job kind, plus file helpers shared with the
// command-line tool.
namespace scriptorium::workbench {

struct TaskResult {
  std::vector<std::string> artifacts;  // relative to the project root
  std::string message;
};

// Dispatches on `kind`; throws on any module error.
TaskResult run_task(ProjectStore& store, JobKind kind, const json& params);

std::filesystem::path resolve_path(const std::filesystem::path& root, const std::string& p);

struct AnnotatedSentence {
  std::vector<std::string> surfaces;
  std::vector<std::string> lemmas;
};

// `surface TAB lemma` per line, blank lines between sentences.
std::vector<AnnotatedSentence> read_annotated_corpus(const std::filesystem::path& path);
void write_annotated_corpus(const std::filesystem::path& path,
                            const std::vector<AnnotatedSentence>& sentences);

// Word tokens of a plain-text (.txt), TEI (.xml) or annotated (.tsv) corpus.
std::vector<std::string> read_word_stream(const std::filesystem::path& path);

// Fills lemma and cert on <w> elements that have no lemma yet; returns the
// number of tokens lemmatized.
std::size_t lemmatize_document(tei::Document& doc, const lemmatizer::LemmatizerModel& model);

std::string learning_curve_svg(const std::vector<recognizer::HistoryEntry>& history);

}  // namespace scriptorium::workbench
