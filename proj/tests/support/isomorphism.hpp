#pragma once

#include "metakernel/model.hpp"

namespace testsupport {

// Brute-force graph isomorphism between two containment subtrees together
// with their internal links: class-labeled tree shape, role-wise link ends,
// association kinds. Ignores the correspondence registry entirely so it can
// serve as an oracle for it. When compare_attributes is set, attribute
// values must agree pairwise as well.
bool subtree_isomorphic(const metakernel::Model& model, metakernel::EntityId a,
                        metakernel::EntityId b, bool compare_attributes = false);

}  // namespace testsupport
