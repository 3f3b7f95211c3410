#include <stdio.h>
int combine(int m, int mid)
{
    int size = 0;
    int hi = 1;
    while (hi <= m) {
        if (hi % mid == 0)
            size++;
        hi++;
    }
    return size;
}
int main(void)
{
    int m = 474;
    int mid = 4;
    int size = combine(m, mid);
    printf("%d\n", size);
    return 0;
}
