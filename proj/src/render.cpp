// Copyright 2026 The SegLink Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "seglink/render.hpp"

#include <cstdio>

namespace seglink {

namespace {

void append(std::string& out, const char* fmt, auto... args) {
  char buf[256];
  const int n = std::snprintf(buf, sizeof buf, fmt, args...);
  out.append(buf, static_cast<size_t>(n));
}

void polygon(std::string& out, const RotatedRect& r, const char* cls) {
  const Quad q = to_quad(r);
  append(out, "<polygon class=\"%s\" points=\"", cls);
  for (size_t i = 0; i < 4; ++i) {
    append(out, "%s%.3f,%.3f", i ? " " : "", q.vertices[i].x, q.vertices[i].y);
  }
  out += "\"/>\n";
}

}  // namespace

std::string render_svg(const Scene& scene, const SegmentGraph* graph,
                       std::span<const RotatedRect> detections) {
  std::string out;
  append(out,
         "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
         "viewBox=\"0 0 %d %d\">\n",
         scene.canvas_w, scene.canvas_h, scene.canvas_w, scene.canvas_h);
  out +=
      "<style>polygon{fill:none;stroke-width:1}.word{stroke:#888}.segment{stroke:#2060d0}"
      ".box{stroke:#000;stroke-width:2}line{stroke-width:1}.within{stroke:#d02020}"
      ".cross{stroke:#20a020}</style>\n";
  append(out, "<rect width=\"%d\" height=\"%d\" fill=\"#fff\"/>\n", scene.canvas_w,
         scene.canvas_h);
  for (const WordBox& w : scene.words) polygon(out, w.rect, "word");
  if (graph != nullptr) {
    for (const SegmentNode& n : graph->nodes) polygon(out, n.rect, "segment");
    for (const SegmentEdge& e : graph->edges) {
      const RotatedRect& a = graph->nodes[static_cast<size_t>(e.a)].rect;
      const RotatedRect& b = graph->nodes[static_cast<size_t>(e.b)].rect;
      append(out, "<line class=\"%s\" x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\"/>\n",
             e.kind == LinkKind::kWithin ? "within" : "cross", a.x, a.y, b.x, b.y);
    }
  }
  for (const RotatedRect& r : detections) polygon(out, r, "box");
  out += "</svg>\n";
  return out;
}

}  // namespace seglink
