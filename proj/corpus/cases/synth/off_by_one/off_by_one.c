/* Copyright 2026 The SymTEE Authors.
 * SPDX-License-Identifier: Apache-2.0 */

#include <tee_internal_api.h>

void stash_name(TEE_Param params[4])
{
    char name[128];

    if (params[2].memref.size > 129) {
        return;
    }
    TEE_MemMove(name, params[2].memref.buffer, params[2].memref.size);
}
