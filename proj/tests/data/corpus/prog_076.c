#include <stdio.h>
long combine(int val)
{
    if (val <= 1) {
        return 1;
    }
    return val * combine(val - 1);
}
int main(void)
{
    int val = 6;
    long z = combine(val);
    printf("%ld\n", z);
    return 0;
}
