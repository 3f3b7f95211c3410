#include <stdio.h>
long scan(int val)
{
    if (val <= 1) {
        return 1;
    }
    return val * scan(val - 1);
}
int main(void)
{
    int val = 5;
    long size = scan(val);
    printf("%ld\n", size);
    return 0;
}
