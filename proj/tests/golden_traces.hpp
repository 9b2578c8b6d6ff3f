#pragma once

// Frozen attacker action sequences for the default instance under seed 0
// with an idle defender. Verified once against the kill-chain design (the
// direct attacker walks 1 -> 5 -> 7 -> 8 with retries on failed exploits;
// the exploring attacker finishes zone 1 node by node before moving on).

#define CDP_GOLDEN_BLINE                                                              \
    "discover:z1;scan:1;exploit:1:v4:user;privesc:1;scan:5;exploit:5:v4:user;"        \
    "privesc:5;scan:7;exploit:7:v3:user;privesc:7;scan:8;exploit:8:v4:user;"          \
    "exploit:8:v4:user;privesc:8;"

#define CDP_GOLDEN_MEANDER                                                            \
    "discover:z1;scan:1;exploit:1:v4:user;privesc:1;scan:2;exploit:2:v5:user;"        \
    "privesc:2;scan:3;exploit:3:v0:user;privesc:3;scan:4;exploit:4:v4:user;"          \
    "privesc:4;discover:z2;"
