"""Bundled demo firmware, embedded so `selftest` works from any install.

The same sources ship as files under firmware/ for hand editing; a test
keeps the two copies identical.
"""

DEMO = """\
# demo.s - smallest useful program: set a register, then park
        addi  x1, x0, 5
park:   jal   x0, park          # self-loop halts the run
"""

TIMING = """\
# timing.s - one instruction of every class, then park
        addi  x1, x0, 12        # i-type alu
        add   x2, x1, x1        # r-type alu
        sw    x2, 64(x0)        # store
        lw    x3, 64(x0)        # load
        beq   x1, x2, miss      # branch, not taken (12 != 24)
        beq   x3, x2, hit       # branch, taken (24 == 24)
miss:   addi  x31, x0, 1        # skipped by the taken branch
hit:    jal   x4, park          # jump, links x4
park:   jal   x0, park
"""

PACER = """\
# pacer.s - sample the sensing block and issue a fixed pacing pulse train
#
# Device blocks sit just above the 4 KiB memory: pacing at 0x1000,
# sensing at 0x1010; the DATA register of each is at offset 8.
        addi  x7, x0, 1
        slli  x7, x7, 12        # x7 = 0x1000, pacing base
        addi  x8, x7, 16        # x8 = 0x1010, sensing base
        addi  x5, x0, 0         # pulses issued
        addi  x6, x0, 8         # pulse train length
loop:   lw    x9, 8(x8)         # sample sensing DATA
        add   x9, x9, x5        # tag the sample with the pulse index
        sw    x9, 8(x7)         # fire pacing DATA
        addi  x5, x5, 1
        beq   x5, x6, done
        jal   x0, loop
done:   jal   x0, done          # park
"""

PROGRAMS = {
    "demo": DEMO,
    "timing": TIMING,
    "pacer": PACER,
}
