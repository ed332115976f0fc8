#pragma once

#include "pseudofree/abelian.hpp"
#include "pseudofree/borel.hpp"
#include "pseudofree/catalog.hpp"
#include "pseudofree/cli.hpp"
#include "pseudofree/cohomology.hpp"
#include "pseudofree/config.hpp"
#include "pseudofree/engine.hpp"
#include "pseudofree/error.hpp"
#include "pseudofree/families.hpp"
#include "pseudofree/forms.hpp"
#include "pseudofree/group.hpp"
#include "pseudofree/group_spec.hpp"
#include "pseudofree/lattice.hpp"
#include "pseudofree/normal_form.hpp"
#include "pseudofree/permutation.hpp"
#include "pseudofree/resolution.hpp"
#include "pseudofree/serialize.hpp"
